#include <doctest.h>

#include <random>

#include "ecrm/assignment.hpp"
#include "ecrm/closure.hpp"
#include "ecrm/inference.hpp"
#include "oracles.hpp"

using namespace ecrm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Dyadic values keep every sum exact, so ties are real ties.
double dyadic(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(-16, 16)(rng) / 8.0;
}

}  // namespace

TEST_SUITE("inference") {
  TEST_CASE("solve_hierarchy small cases") {
    const auto dag = HierarchyDag::from_parents({-1, 0, 1});
    CHECK(solve_hierarchy(vec({1, 2, 0.5}), dag) == vec({0, 0, 0}));
    CHECK(solve_hierarchy(vec({-1, -1, 2}), dag) == vec({1, 1, 0}));
    // Tie between {} and {r, a}: lexicographically smaller is {}.
    CHECK(solve_hierarchy(vec({1, -1, 5}), dag) == vec({0, 0, 0}));
    CHECK(solve_hierarchy(vec({-1, 1, 5}), dag) == vec({1, 0, 0}));
    CHECK(solve_hierarchy(vec({-1, 0, 5}), dag) == vec({1, 0, 0}));
    CHECK_THROWS_AS(solve_hierarchy(vec({1, 2}), dag), InputError);
  }

  TEST_CASE("solve_hierarchy matches enumeration") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 1 + trial % 12;
      const auto parent = oracle::random_shuffled_tree(d, rng);
      const auto pts = oracle::closed_sets(d, oracle::arcs_of(parent));
      Vector c(d);
      for (int j = 0; j < d; ++j) c[j] = trial % 2 ? dyadic(rng) : n(rng);
      const auto [best, value] =
          oracle::argmin(pts, [&](const Vector& y) { return oracle::dot(c, y); });
      const Vector got = solve_hierarchy(c, HierarchyDag::from_parents(parent));
      CHECK(got == best);
    }
    // Multi-parent DAGs.
    for (int trial = 0; trial < 50; ++trial) {
      const int d = 6;
      std::vector<std::pair<int, int>> arcs;
      for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k)
          if (std::bernoulli_distribution(0.35)(rng)) arcs.emplace_back(j, k);
      Vector c(d);
      for (int j = 0; j < d; ++j) c[j] = dyadic(rng);
      const auto [best, value] = oracle::argmin(oracle::closed_sets(d, arcs),
                                                [&](const Vector& y) { return oracle::dot(c, y); });
      CHECK(solve_hierarchy(c, HierarchyDag(d, arcs)) == best);
    }
  }

  TEST_CASE("infer on hierarchies equals brute force") {
    std::mt19937_64 rng(32);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
      const int d = 1 + trial % 10, m = 1 + trial % 7;
      const auto parent = oracle::random_shuffled_tree(d, rng);
      const auto dag = HierarchyDag::from_parents(parent);
      const auto space = OutputSpace::hierarchy(dag);
      const auto pts = oracle::closed_sets(d, oracle::arcs_of(parent));
      Matrix L(m, d);
      for (int i = 0; i < m; ++i)
        L.row(i) = pts[std::uniform_int_distribution<std::size_t>(0, pts.size() - 1)(rng)];
      Vector w(m);
      for (int i = 0; i < m; ++i) w[i] = trial % 2 ? dyadic(rng) : n(rng);
      for (const LossSpec& loss : {LossSpec::hamming(), LossSpec::hierarchical(dag)}) {
        const auto res = infer(w, L, loss, space);
        const auto bf = brute_force_argmin(
            space, [&](const Vector& y) { return weighted_risk(loss, y, L, w); }, 1 << 12);
        if (loss.kind == LossKind::hamming) {
          CHECK(weighted_risk(loss, res.y, L, w) == weighted_risk(loss, bf.y, L, w));
          if (trial % 2) CHECK(res.y == bf.y);
        } else {
          // Sibling weights such as 1/3 are not exact in binary.
          CHECK(weighted_risk(loss, res.y, L, w) ==
                doctest::Approx(weighted_risk(loss, bf.y, L, w)).epsilon(1e-12));
        }
        CHECK(res.objective == doctest::Approx(weighted_risk(loss, res.y, L, w)).epsilon(1e-12));
        CHECK(res.certificate.kind == CertificateKind::exact);
        CHECK(is_feasible(space, res.y));
      }
    }
  }

  TEST_CASE("solve_assignment") {
    Matrix one(2, 2);
    one << 0, 1, 1, 0;
    CHECK(solve_assignment(one) == std::vector<int>{0, 1});
    Matrix eye_pen = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
    CHECK(solve_assignment(eye_pen) == std::vector<int>{0, 1, 2, 3});
    CHECK(solve_assignment(Matrix::Zero(3, 3)) == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(solve_assignment(Matrix::Zero(2, 3)), InputError);

    Matrix S(1, 2);
    S << 1, 2;
    const auto res = infer(vec({1.0}), S, LossSpec::footrule(), OutputSpace::assignment(2));
    CHECK(res.y == vec({1, 2}));
    CHECK(res.objective == 0.0);
  }

  TEST_CASE("footrule inference equals brute force") {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
      const int d = 1 + trial % 6, m = 1 + trial % 5;
      const auto perms = oracle::permutations(d);
      Matrix S(m, d);
      for (int i = 0; i < m; ++i)
        S.row(i) = perms[std::uniform_int_distribution<std::size_t>(0, perms.size() - 1)(rng)];
      Vector w(m);
      for (int i = 0; i < m; ++i) w[i] = trial % 2 ? dyadic(rng) : n(rng);
      const auto f = [&](const Vector& s) {
        double t = 0.0;
        for (int i = 0; i < m; ++i) t += w[i] * oracle::footrule(s, S.row(i).transpose());
        return t;
      };
      const auto [best, value] = oracle::argmin(perms, f);
      const auto res = infer(w, S, LossSpec::footrule(), OutputSpace::assignment(d));
      CHECK(f(res.y) == doctest::Approx(value).epsilon(1e-12));
      if (trial % 2) CHECK(res.y == best);
      CHECK(res.objective == doctest::Approx(f(res.y)).epsilon(1e-12));
    }
  }

  TEST_CASE("binary sign rule") {
    const auto space = OutputSpace::binary_sign();
    Matrix Y(3, 1);
    Y << 1, -1, 1;
    CHECK(infer(vec({0.2, 0.5, 0.3}), Y, LossSpec::zero_one(), space).y == vec({1}));
    CHECK(infer(vec({0.2, 0.6, 0.3}), Y, LossSpec::zero_one(), space).y == vec({-1}));
    CHECK(infer(vec({0.25, 0.5, 0.25}), Y, LossSpec::zero_one(), space).y == vec({1}));
    CHECK(infer(vec({-0.5, 0.0, 0.0}), Y, LossSpec::zero_one(), space).y == vec({-1}));
  }

  TEST_CASE("finite spaces enumerate") {
    const auto space = OutputSpace::finite({vec({0, 1}), vec({1, 0}), vec({1, 1})});
    Matrix L(2, 2);
    L << 1, 0, 1, 1;
    const auto res = infer(vec({0.3, 0.7}), L, LossSpec::hamming(), space);
    CHECK(res.y == vec({1, 1}));
    CHECK(res.objective == doctest::Approx(0.3));
    const auto single = OutputSpace::finite({vec({4, 2})});
    CHECK(brute_force_argmin(single, [](const Vector&) { return 1.0; }, 10).y == vec({4, 2}));
  }

  TEST_CASE("all-zero weights give the smallest output") {
    const auto dag = HierarchyDag::from_parents({-1, 0});
    Matrix L(2, 2);
    L << 1, 1, 1, 0;
    const auto r = infer(Vector::Zero(2), L, LossSpec::hamming(), OutputSpace::hierarchy(dag));
    CHECK(r.y == vec({0, 0}));
    CHECK(r.objective == 0.0);
    Matrix S(1, 3);
    S << 3, 2, 1;
    CHECK(infer(Vector::Zero(1), S, LossSpec::footrule(), OutputSpace::assignment(3)).y ==
          vec({1, 2, 3}));
  }

  TEST_CASE("dispatch errors") {
    Matrix L(1, 2);
    L << 1, 0;
    const auto h = OutputSpace::hierarchy(HierarchyDag::from_parents({-1, 0}));
    CHECK_THROWS_AS(infer(vec({1, 2}), L, LossSpec::hamming(), h), InputError);
    Matrix F = Matrix::Zero(1, 10);
    CHECK_THROWS_AS(infer(vec({1}), F, LossSpec::hamming(), OutputSpace::flow(FlowNetwork::benchmark())),
                    UnsupportedError);
    // Zero-one on a big hierarchy has no structured solver and exceeds the cap.
    std::vector<int> parent(30, 0);
    parent[0] = -1;
    SolverParams p;
    p.enumeration_cap = 1000;
    Matrix big = Matrix::Zero(1, 30);
    CHECK_THROWS_AS(infer(vec({1}), big, LossSpec::zero_one(),
                          OutputSpace::hierarchy(HierarchyDag::from_parents(parent)), p),
                    UnsupportedError);
  }

  TEST_CASE("infer on a trained model uses the model weights") {
    Matrix X(3, 1);
    X << 0.0, 0.5, 1.0;
    Matrix Y(3, 2);
    Y << 0, 0, 1, 0, 1, 1;
    const auto dag = HierarchyDag::from_parents({-1, 0});
    const auto model = fit(KernelSpec::rbf(1.0), 0.01, X, Y, OutputSpace::hierarchy(dag));
    const Vector x = vec({0.9});
    const auto a = infer(model, LossSpec::hamming(), x);
    const auto b = infer(weights(model, x).w, Y, LossSpec::hamming(), model.space);
    CHECK(a.y == b.y);
    CHECK(a.objective == b.objective);
    CHECK(a.objective == doctest::Approx(estimate_conditional_risk(model, LossSpec::hamming(), a.y, x)).epsilon(1e-12));
  }
}
