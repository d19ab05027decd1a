#include <doctest.h>

#include <random>
#include <thread>

#include "ecrm/model.hpp"
#include "oracles.hpp"

using namespace ecrm;

namespace {

Matrix random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = n(rng);
  return M;
}

}  // namespace

TEST_SUITE("kernel_core") {
  TEST_CASE("eval_kernel closed forms") {
    Vector a(2), b(2);
    a << 1, 2;
    b << 3, 4;
    CHECK(eval_kernel(KernelSpec::rbf(1.0), a, a) == 1.0);
    CHECK(eval_kernel(KernelSpec::linear(), a, b) == 11.0);
    Vector z = Vector::Zero(2), o = Vector::Ones(2);
    CHECK(eval_kernel(KernelSpec::rbf(0.5), z, o) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(eval_kernel(KernelSpec::linear(), a, Vector::Zero(3)), InputError);
    CHECK_THROWS_AS(KernelSpec::rbf(0.0).validate(), InputError);
  }

  TEST_CASE("gram matrix") {
    Matrix one(1, 3);
    one << 0.1, 0.2, 0.3;
    const Matrix g1 = gram_matrix(KernelSpec::linear(), one);
    CHECK(g1.rows() == 1);
    CHECK(g1(0, 0) == doctest::Approx(0.14));

    Matrix dup = Matrix::Constant(4, 2, 0.7);
    CHECK((gram_matrix(KernelSpec::rbf(2.0), dup).array() == 1.0).all());

    std::mt19937_64 rng(1);
    const Matrix X = random_matrix(5, 5, rng);
    for (auto spec : {KernelSpec::linear(), KernelSpec::rbf(0.3)}) {
      const Matrix K = gram_matrix(spec, X);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          const Vector xi = X.row(i).transpose(), xj = X.row(j).transpose();
          const double ref = spec.kind == KernelKind::rbf ? oracle::rbf(0.3, xi, xj)
                                                          : oracle::dot(xi, xj);
          CHECK(K(i, j) == doctest::Approx(ref).epsilon(1e-13));
        }
      CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("fit factorizes K + m lambda I") {
    Matrix x1(1, 2);
    x1 << 0.3, -0.2;
    const KernelRidge<double> r1(KernelSpec::rbf(1.0), 1.0, x1);
    const Matrix L1 = r1.factor().matrixL();
    CHECK(L1(0, 0) * L1(0, 0) == doctest::Approx(2.0));

    // Orthonormal rows under the linear kernel give K = I.
    const int m = 4;
    const double lambda = 0.25;
    const KernelRidge<double> ri(KernelSpec::linear(), lambda, Matrix::Identity(m, m));
    const Matrix Li = ri.factor().matrixL();
    CHECK((Li * Li.transpose() - (1.0 + m * lambda) * Matrix::Identity(m, m)).norm() < 1e-12);

    std::mt19937_64 rng(2);
    const Matrix X = random_matrix(8, 3, rng);
    const KernelRidge<double> r(KernelSpec::rbf(0.4), 0.01, X);
    const Matrix L = r.factor().matrixL();
    Matrix target = gram_matrix(KernelSpec::rbf(0.4), X);
    target.diagonal().array() += 8 * 0.01;
    CHECK((L * L.transpose() - target).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(r.jitter() == 0.0);
  }

  TEST_CASE("fit rejects bad input") {
    Matrix X = Matrix::Ones(2, 2);
    CHECK_THROWS_AS(KernelRidge<double>(KernelSpec::rbf(1.0), 0.0, X), InputError);
    CHECK_THROWS_AS(KernelRidge<double>(KernelSpec::rbf(1.0), -1.0, X), InputError);
    X(0, 0) = std::nan("");
    CHECK_THROWS_AS(KernelRidge<double>(KernelSpec::rbf(1.0), 1.0, X), InputError);
    Matrix huge = Matrix::Constant(2, 1, 1e200);
    CHECK_THROWS_AS(KernelRidge<double>(KernelSpec::linear(), 1.0, huge), NumericalError);
    CHECK_THROWS_AS(fit(KernelSpec::linear(), 1.0, Matrix::Ones(2, 1), Matrix::Zero(3, 1),
                        OutputSpace::binary_sign()),
                    InputError);
  }

  TEST_CASE("duplicate training inputs are fine") {
    const KernelRidge<double> r(KernelSpec::rbf(1.0), 1e-6, Matrix::Constant(5, 2, 0.5));
    const Vector w = r.weights(Vector::Constant(2, 0.5));
    CHECK(w.allFinite());
  }

  TEST_CASE("weights solve the ridge system") {
    Matrix x1(1, 1);
    x1 << 0.5;
    const double lambda = 0.3;
    const KernelRidge<double> r1(KernelSpec::rbf(2.0), lambda, x1);
    Vector q(1);
    q << 1.25;
    const double k = std::exp(-2.0 * 0.75 * 0.75);
    CHECK(r1.weights(q)[0] == doctest::Approx(k / (1.0 + lambda)).epsilon(1e-14));

    const int m = 3;
    const KernelRidge<double> ri(KernelSpec::linear(), 0.5, Matrix::Identity(m, m));
    Vector x(3);
    x << 0.2, -1.0, 4.0;
    CHECK((ri.weights(x) - x / (1.0 + m * 0.5)).norm() < 1e-14);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix X = random_matrix(6, 3, rng);
      const Vector xq = random_matrix(3, 1, rng);
      const double lam = 0.05 * (trial + 1);
      const KernelRidge<double> r(KernelSpec::rbf(0.7), lam, X);
      Matrix A(6, 6);
      Vector v(6);
      for (int i = 0; i < 6; ++i) {
        v[i] = oracle::rbf(0.7, X.row(i).transpose(), xq);
        for (int j = 0; j < 6; ++j)
          A(i, j) = oracle::rbf(0.7, X.row(i).transpose(), X.row(j).transpose()) +
                    (i == j ? 6 * lam : 0.0);
      }
      const Vector w = r.weights(xq);
      CHECK((w - oracle::gauss_solve(A, v)).norm() <= 1e-10 * (1.0 + w.norm()));
      CHECK((A * w - v).norm() <= 1e-8 * v.norm());
    }
    CHECK_THROWS_AS(r1.weights(Vector::Zero(2)), InputError);
  }

  TEST_CASE("weights vanish as lambda grows") {
    std::mt19937_64 rng(4);
    const Matrix X = random_matrix(5, 2, rng);
    const Vector x = random_matrix(2, 1, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double lam : {1e-2, 1.0, 1e2, 1e4, 1e6}) {
      const double n = KernelRidge<double>(KernelSpec::rbf(1.0), lam, X).weights(x).norm();
      CHECK(n < prev);
      prev = n;
    }
    CHECK(prev < 1e-6);
  }

  TEST_CASE("centered intercept equals fitting centered targets") {
    std::mt19937_64 rng(5);
    const Matrix X = random_matrix(7, 2, rng);
    const Vector L = random_matrix(7, 1, rng);
    const Vector x = random_matrix(2, 1, rng);
    const KernelRidge<double> plain(KernelSpec::rbf(0.5), 0.1, X);
    const KernelRidge<double> centered(KernelSpec::rbf(0.5), 0.1, X, InterceptMode::centered);
    const double mean = L.mean();
    const double expected = mean + (L.array() - mean).matrix().dot(plain.raw_weights(x));
    CHECK(L.dot(centered.weights(x)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(centered.weights(x).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("estimated risk equals the per-y ridge prediction") {
    std::mt19937_64 rng(6);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 10; ++trial) {
      const int m = 3 + trial % 6, p = 1 + trial % 4;
      const Matrix X = random_matrix(m, p, rng);
      Matrix Y(m, 3);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < 3; ++j) Y(i, j) = coin(rng) ? 1.0 : 0.0;
      std::vector<Vector> pts;
      for (int mask = 0; mask < 8; ++mask) {
        Vector v(3);
        for (int j = 0; j < 3; ++j) v[j] = (mask >> j) & 1;
        pts.push_back(v);
      }
      const double lam = 0.1;
      const auto model = fit(KernelSpec::linear(), lam, X, Y, OutputSpace::finite(pts));
      const Vector x = random_matrix(p, 1, rng);
      for (const Vector& y : pts) {
        Vector Ly(m), v(m);
        Matrix A(m, m);
        for (int i = 0; i < m; ++i) {
          Ly[i] = 0;
          for (int j = 0; j < 3; ++j) Ly[i] += y[j] != Y(i, j);
          v[i] = oracle::dot(X.row(i).transpose(), x);
          for (int k = 0; k < m; ++k)
            A(i, k) = oracle::dot(X.row(i).transpose(), X.row(k).transpose()) +
                      (i == k ? m * lam : 0.0);
        }
        const double ref = oracle::dot(oracle::gauss_solve(A, Ly), v);
        CHECK(estimate_conditional_risk(model, LossSpec::hamming(), y, x) ==
              doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("estimated risk is zero at the only training label") {
    Matrix X(1, 2);
    X << 0.1, 0.9;
    Matrix Y(1, 1);
    Y << -1;
    const auto model = fit(KernelSpec::rbf(1.0), 0.5, X, Y, OutputSpace::binary_sign());
    Vector y(1);
    y << -1;
    CHECK(estimate_conditional_risk(model, LossSpec::zero_one(), y, Vector::Zero(2)) == 0.0);
    Vector bad(1);
    bad << 0.0;
    CHECK_THROWS_AS(estimate_conditional_risk(model, LossSpec::zero_one(), bad, Vector::Zero(2)),
                    InputError);
  }

  TEST_CASE("zero-one risk ordering follows the signed weight sum") {
    std::mt19937_64 rng(7);
    std::bernoulli_distribution coin(0.5);
    const Matrix X = random_matrix(9, 2, rng);
    Matrix Y(9, 1);
    for (int i = 0; i < 9; ++i) Y(i, 0) = coin(rng) ? 1.0 : -1.0;
    const auto model = fit(KernelSpec::rbf(1.0), 0.01, X, Y, OutputSpace::binary_sign());
    Vector plus(1), minus(1);
    plus << 1;
    minus << -1;
    for (int q = 0; q < 50; ++q) {
      const Vector x = random_matrix(2, 1, rng);
      const Vector w = weights(model, x).w;
      const double s = w.dot(Y.col(0));
      const double rp = estimate_conditional_risk(model, LossSpec::zero_one(), plus, x);
      const double rm = estimate_conditional_risk(model, LossSpec::zero_one(), minus, x);
      // R(+1) - R(-1) = -s
      CHECK(rp - rm == doctest::Approx(-s).epsilon(1e-10));
    }
  }

  TEST_CASE("concurrent weight queries match sequential ones") {
    std::mt19937_64 rng(8);
    const Matrix X = random_matrix(40, 3, rng);
    const KernelRidge<double> r(KernelSpec::rbf(0.5), 0.01, X);
    const Matrix Q = random_matrix(64, 3, rng);
    Matrix seq(64, 40), par(64, 40);
    for (int i = 0; i < 64; ++i) seq.row(i) = r.weights(Q.row(i).transpose()).transpose();
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t)
      pool.emplace_back([&, t] {
        for (int i = t; i < 64; i += 4) par.row(i) = r.weights(Q.row(i).transpose()).transpose();
      });
    for (auto& th : pool) th.join();
    CHECK(seq == par);
  }
}
