#include <doctest.h>

#include <random>
#include <set>

#include "ecrm/output_space.hpp"
#include "oracles.hpp"

using namespace ecrm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<std::vector<long long>> rows_of(const IntMatrix& A) {
  std::vector<std::vector<long long>> out(A.rows(), std::vector<long long>(A.cols()));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) out[i][j] = A(i, j);
  return out;
}

// TU by cofactor determinants over every square submatrix.
bool oracle_tu(const IntMatrix& A) {
  const int n = static_cast<int>(A.rows()), d = static_cast<int>(A.cols());
  for (long long rm = 1; rm < (1LL << n); ++rm)
    for (long long cm = 1; cm < (1LL << d); ++cm) {
      if (__builtin_popcountll(rm) != __builtin_popcountll(cm)) continue;
      std::vector<std::vector<long long>> sub;
      for (int r = 0; r < n; ++r) {
        if (!((rm >> r) & 1)) continue;
        std::vector<long long> row;
        for (int c = 0; c < d; ++c)
          if ((cm >> c) & 1) row.push_back(A(r, c));
        sub.push_back(row);
      }
      const long long det = oracle::det(sub);
      if (det < -1 || det > 1) return false;
    }
  return true;
}

}  // namespace

TEST_SUITE("output_spaces") {
  TEST_CASE("hierarchy constraint matrix") {
    const auto single = hierarchy_constraint_matrix(HierarchyDag(2, {{0, 1}}));
    CHECK(single.A.rows() == 1);
    CHECK(single.A(0, 0) == -1);
    CHECK(single.A(0, 1) == 1);
    CHECK(single.rhs[0] == 0.0);
    CHECK(single.senses[0] == RowSense::less_equal);

    const auto empty = hierarchy_constraint_matrix(HierarchyDag(3, {}));
    CHECK(empty.A.rows() == 0);
    CHECK(empty.A.cols() == 3);

    const auto diamond = hierarchy_constraint_matrix(HierarchyDag(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
    CHECK(diamond.A.rows() == 4);
    for (int r = 0; r < 4; ++r) {
      CHECK(diamond.A.row(r).sum() == 0);
      CHECK(diamond.A.row(r).cwiseAbs().sum() == 2);
    }
  }

  TEST_CASE("hierarchy validation") {
    CHECK_THROWS_AS(HierarchyDag(2, {{0, 0}}), InputError);
    CHECK_THROWS_AS(HierarchyDag(2, {{0, 1}, {0, 1}}), InputError);
    CHECK_THROWS_AS(HierarchyDag(2, {{0, 2}}), InputError);
    CHECK_THROWS_AS(HierarchyDag(3, {{0, 1}, {1, 2}, {2, 0}}), InputError);
    const HierarchyDag dag(4, {{2, 0}, {0, 3}, {2, 1}});
    CHECK(dag.root() == 2);
    CHECK(dag.is_arborescence());
    CHECK(dag.ancestors(3) == std::vector<int>{0, 2});
    CHECK_FALSE(HierarchyDag(3, {{0, 2}, {1, 2}}).is_arborescence());
  }

  TEST_CASE("feasibility") {
    const auto h = OutputSpace::hierarchy(HierarchyDag(2, {{0, 1}}));
    CHECK_FALSE(is_feasible(h, vec({0, 1})));
    CHECK(is_feasible(h, vec({1, 1})));
    CHECK_FALSE(is_feasible(h, vec({0.5, 0})));
    CHECK_THROWS_AS(is_feasible(h, vec({1})), InputError);

    const auto multi = OutputSpace::hierarchy(HierarchyDag(3, {{0, 2}, {1, 2}}));
    CHECK_FALSE(is_feasible(multi, vec({1, 0, 1})));
    CHECK(is_feasible(multi, vec({1, 1, 1})));

    const auto a = OutputSpace::assignment(3);
    CHECK(is_feasible(a, vec({3, 1, 2})));
    CHECK_FALSE(is_feasible(a, vec({1, 1, 2})));
    CHECK(assignment_indicator(vec({3, 1, 2})) == vec({0, 0, 1, 1, 0, 0, 0, 1, 0}));

    const FlowNetwork circ(3, {{0, 1}, {1, 2}, {2, 0}}, Vector::Zero(3));
    CHECK(is_feasible(OutputSpace::flow(circ), Vector::Zero(3)));
    CHECK_FALSE(is_feasible(OutputSpace::flow(circ), vec({1, 1, 0})));
  }

  TEST_CASE("flow feasibility is invariant under circulations") {
    // s=0, t=3 with a cycle 1 -> 2 -> 1.
    Vector b = vec({1, 0, 0, -1});
    const FlowNetwork net(4, {{0, 1}, {1, 2}, {2, 1}, {2, 3}, {1, 3}}, b);
    const auto space = OutputSpace::flow(net);
    const Vector y = vec({1, 0.4, 0, 0.4, 0.6});
    CHECK(is_feasible(space, y, 1e-9));
    for (double t : {0.1, 0.5, 3.0}) {
      Vector z = y;
      z[1] += t;
      z[2] += t;
      CHECK(is_feasible(space, z, 1e-9));
    }
    Vector bad = y;
    bad[1] += 1e-6;
    CHECK_FALSE(is_feasible(space, bad, 1e-9));
  }

  TEST_CASE("finite spaces") {
    CHECK_THROWS_AS(OutputSpace::finite({vec({1}), vec({1})}), InputError);
    CHECK_THROWS_AS(OutputSpace::finite({}), InputError);
    const auto s = OutputSpace::finite({vec({2, 0}), vec({1, 1})});
    CHECK(enumerate_space(s, 10) == s.points());
    CHECK(is_feasible(s, vec({1, 1})));
    CHECK_FALSE(is_feasible(s, vec({1, 2})));
    CHECK(OutputSpace::binary_sign().is_binary_sign());
  }

  TEST_CASE("total unimodularity") {
    CHECK(is_totally_unimodular(IntMatrix::Identity(4, 4)) == TuVerdict::yes);
    IntMatrix bad(2, 2);
    bad << 1, 1, 1, -1;
    CHECK(is_totally_unimodular(bad) == TuVerdict::no);
    CHECK(is_totally_unimodular(IntMatrix::Identity(12, 12), 100) == TuVerdict::unknown);

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
      const auto parent = oracle::random_shuffled_tree(2 + trial % 5, rng);
      CHECK(is_totally_unimodular(
                hierarchy_constraint_matrix(HierarchyDag::from_parents(parent)).A) ==
            TuVerdict::yes);
    }
    // Random DAGs with multiple parents.
    for (int trial = 0; trial < 10; ++trial) {
      const int d = 5;
      std::vector<HierarchyDag::Arc> arcs;
      for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k)
          if (std::bernoulli_distribution(0.4)(rng)) arcs.emplace_back(j, k);
      CHECK(is_totally_unimodular(hierarchy_constraint_matrix(HierarchyDag(d, arcs)).A) ==
            TuVerdict::yes);
    }
    for (int d = 1; d <= 3; ++d)
      CHECK(is_totally_unimodular(assignment_constraint_matrix(d).A) == TuVerdict::yes);
    CHECK(is_totally_unimodular(assignment_constraint_matrix(4).A, 1'000'000'000) ==
          TuVerdict::yes);

    // Small random {-1,0,1} matrices against the cofactor oracle.
    std::uniform_int_distribution<int> entry(-1, 1);
    for (int trial = 0; trial < 200; ++trial) {
      IntMatrix A(3, 4);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) A(i, j) = entry(rng);
      CHECK((is_totally_unimodular(A) == TuVerdict::yes) == oracle_tu(A));
    }
    CHECK(square_submatrix_count(2, 2) == 5.0);
  }

  TEST_CASE("enumeration") {
    const auto chain2 = OutputSpace::hierarchy(HierarchyDag(2, {{0, 1}}));
    const auto pts = enumerate_space(chain2, 100);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0] == vec({0, 0}));
    CHECK(pts[1] == vec({1, 0}));
    CHECK(pts[2] == vec({1, 1}));
    CHECK(enumerate_space(OutputSpace::assignment(3), 100).size() == 6);
    CHECK_THROWS_AS(enumerate_space(OutputSpace::assignment(5), 100), InputError);
    CHECK_THROWS_AS(enumerate_space(OutputSpace::flow(FlowNetwork::benchmark()), 100), InputError);

    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
      const auto parent = oracle::random_shuffled_tree(1 + trial % 10, rng);
      const auto space = OutputSpace::hierarchy(HierarchyDag::from_parents(parent));
      const auto got = enumerate_space(space, 1 << 12);
      CHECK(got == oracle::closed_sets(space.dim(), oracle::arcs_of(parent)));
      for (const auto& y : got) CHECK(is_feasible(space, y));
    }
    for (int d = 1; d <= 6; ++d) {
      const auto got = enumerate_space(OutputSpace::assignment(d), 1000);
      CHECK(got == oracle::permutations(d));
      std::set<std::vector<double>> uniq;
      for (const auto& y : got) uniq.insert(std::vector<double>(y.data(), y.data() + y.size()));
      CHECK(uniq.size() == got.size());
    }
  }
}
