#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "ecrm/common.hpp"
#include "ecrm/flow_network.hpp"
#include "ecrm/hierarchy.hpp"

namespace ecrm {

enum class SpaceKind { hierarchy, assignment, flow_polytope, explicit_finite };

std::string to_string(SpaceKind kind);

/// A structured output domain. Every output is stored as a dense vector:
///  - hierarchy: d entries in {0,1}, y_child <= y_parent on every arc;
///  - assignment: the rank vector of a permutation, entries 1..d;
///  - flow_polytope: one nonnegative flow per arc, conserving at every node;
///  - explicit_finite: one of a fixed, duplicate-free list of vectors.
class OutputSpace {
 public:
  static OutputSpace hierarchy(HierarchyDag dag);
  static OutputSpace assignment(int d);
  static OutputSpace flow(FlowNetwork network);
  static OutputSpace finite(std::vector<Vector> points);
  /// The binary classification space {-1, +1} as a one-dimensional finite set.
  static OutputSpace binary_sign();

  SpaceKind kind() const;
  /// Length of the output encoding.
  int dim() const;
  bool is_discrete() const { return kind() != SpaceKind::flow_polytope; }
  /// True for the two-point space {-1}, {+1}.
  bool is_binary_sign() const;

  const HierarchyDag& dag() const;
  int assignment_size() const;
  const FlowNetwork& network() const;
  const std::vector<Vector>& points() const;

 private:
  struct Assignment {
    int d;
  };
  using Payload = std::variant<HierarchyDag, Assignment, FlowNetwork, std::vector<Vector>>;
  explicit OutputSpace(Payload p) : payload_(std::move(p)) {}
  Payload payload_;
};

enum class RowSense { less_equal, greater_equal, equal };

/// Rows a_i^T y (sense) rhs_i.
struct ConstraintMatrix {
  IntMatrix A;
  Vector rhs;
  std::vector<RowSense> senses;
};

/// One row per arc (parent, child): +1 on the child, -1 on the parent, <= 0.
ConstraintMatrix hierarchy_constraint_matrix(const HierarchyDag& dag);
/// Row and column sums of the d x d indicator y_jk (row-major), each = 1.
ConstraintMatrix assignment_constraint_matrix(int d);
/// Node-arc incidence (+1 for outgoing, -1 for incoming), = b.
ConstraintMatrix flow_constraint_matrix(const FlowNetwork& network);

/// Indicator encoding y_jk = 1 iff rank(j) = k (row-major, d*d entries).
Vector assignment_indicator(const Vector& ranks);

bool is_feasible(const OutputSpace& space, const Vector& y, double tol = 1e-9);

enum class TuVerdict { yes, no, unknown };
std::string to_string(TuVerdict v);

/// Checks every square submatrix with exact integer determinants. Answers
/// unknown when the number of submatrices exceeds size_cap.
TuVerdict is_totally_unimodular(const IntMatrix& A, std::size_t size_cap = 2'000'000);

/// Total number of square submatrices of an n x d matrix (saturates at
/// the largest finite double).
double square_submatrix_count(long long n, long long d);

/// All feasible outputs of a discrete space. Hierarchies and assignments come
/// out in lexicographic order, explicit sets in their stored order.
/// Throws InputError for continuous spaces or when more than cap exist.
std::vector<Vector> enumerate_space(const OutputSpace& space, std::size_t cap);

}  // namespace ecrm
