#include <doctest.h>

#include <random>

#include "ecrm/additive.hpp"
#include "ecrm/inference.hpp"
#include "oracles.hpp"

using namespace ecrm;

namespace {

Matrix random_inputs(int m, int p, std::mt19937_64& rng) {
  Matrix X(m, p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = std::uniform_real_distribution<double>(0, 1)(rng);
  return X;
}

Matrix random_labels(int m, const std::vector<int>& parent, std::mt19937_64& rng) {
  const auto pts = oracle::closed_sets(static_cast<int>(parent.size()), oracle::arcs_of(parent));
  Matrix Y(m, static_cast<int>(parent.size()));
  for (int i = 0; i < m; ++i)
    Y.row(i) = pts[std::uniform_int_distribution<std::size_t>(0, pts.size() - 1)(rng)];
  return Y;
}

// Kronecker product with the (i, k) -> i * d + k vectorization.
Matrix kron(const Matrix& K, const Matrix& A) {
  Matrix G(K.rows() * A.rows(), K.cols() * A.cols());
  for (int i = 0; i < K.rows(); ++i)
    for (int k = 0; k < K.cols(); ++k) G.block(i * A.rows(), k * A.cols(), A.rows(), A.cols()) = K(i, k) * A;
  return G;
}

Vector flatten(const Matrix& M) {
  Vector v(M.size());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) v[i * M.cols() + j] = M(i, j);
  return v;
}

}  // namespace

TEST_SUITE("additive_model") {
  TEST_CASE("single sample, single node is a scalar ridge") {
    Matrix X(1, 2);
    X << 0.2, 0.4;
    Matrix Y(1, 1);
    Y << 1;
    const auto dag = HierarchyDag::from_parents({-1});
    const double lambda = 0.25;
    const auto model = fit_additive(X, Y, dag, KernelSpec::rbf(1.0), lambda);
    CHECK(model.alpha0(0, 0) == doctest::Approx(1.0 / (1.0 + lambda)).epsilon(1e-14));
    CHECK(model.alpha1(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    const auto s = additive_node_scores(model, X.row(0).transpose());
    CHECK(s.off[0] == doctest::Approx(1.0 / (1.0 + lambda)).epsilon(1e-14));
    // Single node: threshold rule picks 1 when on < off.
    CHECK(infer_additive(model, X.row(0).transpose()).y[0] == 1.0);
  }

  TEST_CASE("fit minimizes the objective") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
      const int m = 3 + trial % 5, d = 2 + trial % 4;
      const auto parent = oracle::random_shuffled_tree(d, rng);
      const auto dag = HierarchyDag::from_parents(parent);
      const Matrix X = random_inputs(m, 2, rng);
      const Matrix Y = random_labels(m, parent, rng);
      const auto model = fit_additive(X, Y, dag, KernelSpec::rbf(2.0), 0.1);
      const double at = additive_objective(model, Y, model.alpha0, model.alpha1);
      CHECK(at <= additive_objective(model, Y, Matrix::Zero(m, d), Matrix::Zero(m, d)));
      std::normal_distribution<double> n(0.0, 1e-3);
      for (int k = 0; k < 10; ++k) {
        Matrix p0 = model.alpha0, p1 = model.alpha1;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < d; ++j) {
            p0(i, j) += n(rng);
            p1(i, j) += n(rng);
          }
        CHECK(at <= additive_objective(model, Y, p0, p1) + 1e-12);
      }
    }
  }

  TEST_CASE("3-chain with m = 3 matches a dense normal-equation solve") {
    std::mt19937_64 rng(62);
    const Matrix X = random_inputs(3, 2, rng);
    Matrix Y(3, 3);
    Y << 1, 1, 0, 1, 0, 0, 1, 1, 1;
    const auto dag = HierarchyDag::from_parents({-1, 0, 1});
    const double lambda = 0.05;
    const auto model = fit_additive(X, Y, dag, KernelSpec::rbf(1.5), lambda);

    Matrix K(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        K(i, k) = oracle::rbf(1.5, X.row(i).transpose(), X.row(k).transpose());
    Matrix A(3, 3);
    A << 1, 1, 0, 1, 1, 1, 0, 1, 1;
    const Matrix G = kron(K, A);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    const Matrix absG = es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() *
                        es.eigenvectors().transpose();
    const Matrix normal = G * G + lambda * absG;
    const Vector a0 = oracle::gauss_solve(normal, G * flatten(Y));
    const Vector a1 = oracle::gauss_solve(normal, G * flatten(Matrix::Ones(3, 3) - Y));
    CHECK((flatten(model.alpha0) - a0).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((flatten(model.alpha1) - a1).cwiseAbs().maxCoeff() <= 1e-8);
  }

  TEST_CASE("additive risk") {
    std::mt19937_64 rng(63);
    const auto dag = HierarchyDag::from_parents({-1, 0});
    const Matrix X = random_inputs(2, 3, rng);
    Matrix Y(2, 2);
    Y << 1, 0, 1, 1;
    const auto model = fit_additive(X, Y, dag, KernelSpec::rbf(1.0), 0.2);
    const Vector x = random_inputs(1, 3, rng).row(0).transpose();

    // Hand expansion: f(u, j, x) = sum_i sum_{k in N(j)} alpha_u(i, k) k(x, x_i).
    double v[2];
    for (int i = 0; i < 2; ++i) v[i] = oracle::rbf(1.0, X.row(i).transpose(), x);
    // Both nodes are neighbours of each other, so N(0) = N(1) = {0, 1}.
    auto f = [&](int u, int) {
      const Matrix& a = u ? model.alpha1 : model.alpha0;
      double t = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) t += a(i, k) * v[i];
      return t;
    };
    const Vector y0 = Vector::Zero(2);
    CHECK(additive_risk(model, x, y0) == doctest::Approx(f(0, 0) + f(0, 1)).epsilon(1e-13));
    const Vector y10 = (Vector(2) << 1, 0).finished();
    CHECK(additive_risk(model, x, y10) == doctest::Approx(f(1, 0) + f(0, 1)).epsilon(1e-13));
    const Vector y11 = Vector::Ones(2);
    CHECK(additive_risk(model, x, y11) == doctest::Approx(f(1, 0) + f(1, 1)).epsilon(1e-13));
    const Vector bad = (Vector(2) << 0, 1).finished();
    CHECK_THROWS_AS(additive_risk(model, x, bad), InputError);
  }

  TEST_CASE("affine in each coordinate") {
    std::mt19937_64 rng(64);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 2 + trial % 8, m = 5;
      const auto parent = oracle::random_shuffled_tree(d, rng);
      const auto dag = HierarchyDag::from_parents(parent);
      const auto model = fit_additive(random_inputs(m, 3, rng), random_labels(m, parent, rng), dag,
                                      KernelSpec::rbf(1.0), 0.1, trial % 2 == 0);
      const Vector x = random_inputs(1, 3, rng).row(0).transpose();
      const auto s = additive_node_scores(model, x);
      CHECK(additive_risk(model, x, Vector::Zero(d)) == doctest::Approx(s.off.sum()).epsilon(1e-13));
      for (const auto& y : oracle::closed_sets(d, oracle::arcs_of(parent))) {
        const double r = additive_risk(model, x, y);
        for (int j = 0; j < d; ++j) {
          Vector z = y;
          z[j] = 1.0 - z[j];
          bool ok = true;
          for (const auto& [p, c] : oracle::arcs_of(parent)) ok = ok && z[c] <= z[p];
          if (!ok) continue;
          const double diff = additive_risk(model, x, z) - r;
          const double coef = (s.on[j] - s.off[j]) * (z[j] - y[j]);
          CHECK(std::abs(diff - coef) <= 1e-12 * (1.0 + std::abs(r)));
        }
      }
    }
  }

  TEST_CASE("infer_additive equals brute force") {
    std::mt19937_64 rng(65);
    for (int trial = 0; trial < 30; ++trial) {
      const int d = 1 + trial % 10, m = 4 + trial % 5;
      const auto parent = oracle::random_shuffled_tree(d, rng);
      const auto dag = HierarchyDag::from_parents(parent);
      const auto model = fit_additive(random_inputs(m, 2, rng), random_labels(m, parent, rng), dag,
                                      KernelSpec::rbf(3.0), 0.01);
      const Vector x = random_inputs(1, 2, rng).row(0).transpose();
      const auto res = infer_additive(model, x);
      const auto [best, value] = oracle::argmin(oracle::closed_sets(d, oracle::arcs_of(parent)),
                                                [&](const Vector& y) { return additive_risk(model, x, y); });
      CHECK(additive_risk(model, x, res.y) == doctest::Approx(value).epsilon(1e-12));
      CHECK(res.objective == doctest::Approx(additive_risk(model, x, res.y)).epsilon(1e-12));
    }
  }

  TEST_CASE("positive coefficients select nothing") {
    AdditiveModel model;
    model.kernel = KernelSpec::linear();
    model.dag = HierarchyDag::from_parents({-1, 0, 0});
    model.neighbors = false;
    model.inputs = Matrix::Ones(1, 1);
    model.alpha0 = Matrix::Zero(1, 3);
    model.alpha1 = Matrix::Constant(1, 3, 0.5);
    CHECK(infer_additive(model, Vector::Ones(1)).y == Vector::Zero(3));
  }

  TEST_CASE("without neighbours nodes decouple") {
    std::mt19937_64 rng(66);
    const std::vector<int> parent = {-1, 0, 0, 1};
    const auto dag = HierarchyDag::from_parents(parent);
    const Matrix X = random_inputs(6, 2, rng);
    Matrix Y = random_labels(6, parent, rng);
    // Flip node 2, a leaf under the root, with the root kept on.
    Y.col(0).setOnes();
    Matrix Z = Y;
    for (int i = 0; i < 6; ++i) Z(i, 2) = 1.0 - Z(i, 2);
    const auto b0 = fit_additive(X, Y, dag, KernelSpec::rbf(1.0), 0.1, false);
    const auto b1 = fit_additive(X, Z, dag, KernelSpec::rbf(1.0), 0.1, false);
    for (int j : {0, 1, 3}) {
      CHECK((b0.alpha0.col(j) - b1.alpha0.col(j)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((b0.alpha1.col(j) - b1.alpha1.col(j)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK((b0.alpha0.col(2) - b1.alpha0.col(2)).cwiseAbs().maxCoeff() > 1e-3);
  }

  TEST_CASE("input validation") {
    const auto dag = HierarchyDag::from_parents({-1, 0});
    Matrix Y(1, 2);
    Y << 1, 0.5;
    CHECK_THROWS_AS(fit_additive(Matrix::Ones(1, 1), Y, dag, KernelSpec::rbf(1.0), 0.1), InputError);
    CHECK_THROWS_AS(fit_additive(Matrix::Ones(1, 1), Matrix::Ones(1, 2), dag, KernelSpec::rbf(1.0), 0.0),
                    InputError);
    CHECK_THROWS_AS(fit_additive(Matrix::Ones(2, 1), Matrix::Ones(1, 2), dag, KernelSpec::rbf(1.0), 0.1),
                    InputError);
  }
}
