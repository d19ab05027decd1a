#include "ecrm/output_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ecrm {

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::hierarchy: return "hierarchy";
    case SpaceKind::assignment: return "assignment";
    case SpaceKind::flow_polytope: return "flow";
    case SpaceKind::explicit_finite: return "finite";
  }
  return "?";
}

OutputSpace OutputSpace::hierarchy(HierarchyDag dag) { return OutputSpace(std::move(dag)); }

OutputSpace OutputSpace::assignment(int d) {
  if (d < 1) throw InputError("assignment space needs d >= 1");
  return OutputSpace(Assignment{d});
}

OutputSpace OutputSpace::flow(FlowNetwork network) { return OutputSpace(std::move(network)); }

OutputSpace OutputSpace::finite(std::vector<Vector> points) {
  if (points.empty()) throw InputError("finite output space is empty");
  const auto dim = points.front().size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) throw InputError("finite output space mixes dimensions");
    for (std::size_t j = 0; j < i; ++j)
      if (points[i] == points[j])
        throw InputError("finite output space lists point " + std::to_string(i) + " twice");
  }
  return OutputSpace(std::move(points));
}

OutputSpace OutputSpace::binary_sign() {
  return finite({Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)});
}

SpaceKind OutputSpace::kind() const {
  switch (payload_.index()) {
    case 0: return SpaceKind::hierarchy;
    case 1: return SpaceKind::assignment;
    case 2: return SpaceKind::flow_polytope;
    default: return SpaceKind::explicit_finite;
  }
}

int OutputSpace::dim() const {
  switch (kind()) {
    case SpaceKind::hierarchy: return dag().size();
    case SpaceKind::assignment: return assignment_size();
    case SpaceKind::flow_polytope: return network().arc_count();
    case SpaceKind::explicit_finite: return static_cast<int>(points().front().size());
  }
  return 0;
}

bool OutputSpace::is_binary_sign() const {
  if (kind() != SpaceKind::explicit_finite) return false;
  const auto& p = points();
  if (p.size() != 2 || p[0].size() != 1) return false;
  return (p[0][0] == -1.0 && p[1][0] == 1.0) || (p[0][0] == 1.0 && p[1][0] == -1.0);
}

const HierarchyDag& OutputSpace::dag() const {
  if (auto* p = std::get_if<HierarchyDag>(&payload_)) return *p;
  throw InputError("output space is not a hierarchy");
}

int OutputSpace::assignment_size() const {
  if (auto* p = std::get_if<Assignment>(&payload_)) return p->d;
  throw InputError("output space is not an assignment space");
}

const FlowNetwork& OutputSpace::network() const {
  if (auto* p = std::get_if<FlowNetwork>(&payload_)) return *p;
  throw InputError("output space is not a flow polytope");
}

const std::vector<Vector>& OutputSpace::points() const {
  if (auto* p = std::get_if<std::vector<Vector>>(&payload_)) return *p;
  throw InputError("output space is not an explicit finite set");
}

ConstraintMatrix hierarchy_constraint_matrix(const HierarchyDag& dag) {
  const auto& arcs = dag.arcs();
  ConstraintMatrix c;
  c.A = IntMatrix::Zero(static_cast<Eigen::Index>(arcs.size()), dag.size());
  c.rhs = Vector::Zero(static_cast<Eigen::Index>(arcs.size()));
  c.senses.assign(arcs.size(), RowSense::less_equal);
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    c.A(a, arcs[a].second) = 1;   // child (tail)
    c.A(a, arcs[a].first) = -1;   // parent (head)
  }
  return c;
}

ConstraintMatrix assignment_constraint_matrix(int d) {
  ConstraintMatrix c;
  c.A = IntMatrix::Zero(2 * d, d * d);
  c.rhs = Vector::Ones(2 * d);
  c.senses.assign(2 * d, RowSense::equal);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      c.A(j, j * d + k) = 1;
      c.A(d + k, j * d + k) = 1;
    }
  return c;
}

ConstraintMatrix flow_constraint_matrix(const FlowNetwork& network) {
  ConstraintMatrix c;
  c.A = IntMatrix::Zero(network.node_count(), network.arc_count());
  c.rhs = network.supply();
  c.senses.assign(network.node_count(), RowSense::equal);
  for (int a = 0; a < network.arc_count(); ++a) {
    c.A(network.arcs()[a].tail, a) += 1;
    c.A(network.arcs()[a].head, a) -= 1;
  }
  return c;
}

namespace {

bool is_permutation_ranks(const Vector& y) {
  const auto d = y.size();
  std::vector<char> used(d, 0);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double r = y[j];
    if (r != std::floor(r) || r < 1 || r > static_cast<double>(d)) return false;
    auto& u = used[static_cast<std::size_t>(r) - 1];
    if (u) return false;
    u = 1;
  }
  return true;
}

void check_dim(const OutputSpace& space, const Vector& y) {
  if (y.size() != space.dim())
    throw InputError("output has " + std::to_string(y.size()) + " entries, " +
                     to_string(space.kind()) + " space expects " + std::to_string(space.dim()));
}

}  // namespace

Vector assignment_indicator(const Vector& ranks) {
  if (!is_permutation_ranks(ranks)) throw InputError("not a permutation of 1..d");
  const auto d = ranks.size();
  Vector y = Vector::Zero(d * d);
  for (Eigen::Index j = 0; j < d; ++j) y[j * d + static_cast<Eigen::Index>(ranks[j]) - 1] = 1.0;
  return y;
}

bool is_feasible(const OutputSpace& space, const Vector& y, double tol) {
  check_dim(space, y);
  switch (space.kind()) {
    case SpaceKind::hierarchy: {
      for (Eigen::Index j = 0; j < y.size(); ++j)
        if (y[j] != 0.0 && y[j] != 1.0) return false;
      for (const auto& [p, c] : space.dag().arcs())
        if (y[c] > y[p]) return false;
      return true;
    }
    case SpaceKind::assignment:
      return is_permutation_ranks(y);
    case SpaceKind::flow_polytope: {
      if (!y.allFinite()) return false;
      if ((y.array() < -tol).any()) return false;
      return space.network().divergence_residual(y).cwiseAbs().maxCoeff() <= tol;
    }
    case SpaceKind::explicit_finite:
      for (const auto& p : space.points())
        if (p == y) return true;
      return false;
  }
  return false;
}

std::string to_string(TuVerdict v) {
  switch (v) {
    case TuVerdict::yes: return "true";
    case TuVerdict::no: return "false";
    case TuVerdict::unknown: return "unknown";
  }
  return "unknown";
}

double square_submatrix_count(long long n, long long d) {
  // sum_k C(n,k) C(d,k), accumulated in floating point.
  double total = 0.0;
  double cn = 1.0, cd = 1.0;
  for (long long k = 1; k <= std::min(n, d); ++k) {
    cn = cn * static_cast<double>(n - k + 1) / static_cast<double>(k);
    cd = cd * static_cast<double>(d - k + 1) / static_cast<double>(k);
    total += cn * cd;
    if (!std::isfinite(total)) return std::numeric_limits<double>::max();
  }
  return total;
}

namespace {

// Fraction-free Gaussian elimination; exact for integer input.
long long bareiss_determinant(std::vector<long long> a, int k) {
  long long sign = 1;
  long long prev = 1;
  for (int i = 0; i < k - 1; ++i) {
    if (a[i * k + i] == 0) {
      int swap = -1;
      for (int r = i + 1; r < k; ++r)
        if (a[r * k + i] != 0) {
          swap = r;
          break;
        }
      if (swap < 0) return 0;
      for (int c = 0; c < k; ++c) std::swap(a[i * k + c], a[swap * k + c]);
      sign = -sign;
    }
    for (int r = i + 1; r < k; ++r) {
      for (int c = i + 1; c < k; ++c)
        a[r * k + c] = (a[r * k + c] * a[i * k + i] - a[r * k + i] * a[i * k + c]) / prev;
    }
    prev = a[i * k + i];
  }
  return sign * a[(k - 1) * k + (k - 1)];
}

bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

TuVerdict is_totally_unimodular(const IntMatrix& A, std::size_t size_cap) {
  const auto n = A.rows();
  const auto d = A.cols();
  if (n == 0 || d == 0) return TuVerdict::yes;
  // 1x1 minors first: this also bounds the entries for the exact determinants.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (A(i, j) < -1 || A(i, j) > 1) return TuVerdict::no;
  if (square_submatrix_count(n, d) > static_cast<double>(size_cap)) return TuVerdict::unknown;

  const int kmax = static_cast<int>(std::min(n, d));
  std::vector<long long> buf;
  for (int k = 2; k <= kmax; ++k) {
    std::vector<int> rows(k);
    std::iota(rows.begin(), rows.end(), 0);
    do {
      std::vector<int> cols(k);
      std::iota(cols.begin(), cols.end(), 0);
      do {
        buf.resize(static_cast<std::size_t>(k) * k);
        for (int r = 0; r < k; ++r)
          for (int c = 0; c < k; ++c) buf[r * k + c] = A(rows[r], cols[c]);
        const long long det = bareiss_determinant(buf, k);
        if (det < -1 || det > 1) return TuVerdict::no;
      } while (next_combination(cols, static_cast<int>(d)));
    } while (next_combination(rows, static_cast<int>(n)));
  }
  return TuVerdict::yes;
}

namespace {

void enumerate_closed_sets(const HierarchyDag& dag, int j, Vector& y, std::vector<Vector>& out,
                           std::size_t cap) {
  if (j == dag.size()) {
    for (const auto& [p, c] : dag.arcs())
      if (y[c] > y[p]) return;
    if (out.size() >= cap)
      throw InputError("output space has more than " + std::to_string(cap) + " elements");
    out.push_back(y);
    return;
  }
  for (double v : {0.0, 1.0}) {
    bool ok = true;
    if (v == 1.0) {
      for (int p : dag.parents(j))
        if (p < j && y[p] == 0.0) ok = false;
    } else {
      for (int c : dag.children(j))
        if (c < j && y[c] == 1.0) ok = false;
    }
    if (!ok) continue;
    y[j] = v;
    enumerate_closed_sets(dag, j + 1, y, out, cap);
  }
  y[j] = 0.0;
}

}  // namespace

std::vector<Vector> enumerate_space(const OutputSpace& space, std::size_t cap) {
  std::vector<Vector> out;
  switch (space.kind()) {
    case SpaceKind::hierarchy: {
      Vector y = Vector::Zero(space.dim());
      enumerate_closed_sets(space.dag(), 0, y, out, cap);
      return out;
    }
    case SpaceKind::assignment: {
      const int d = space.assignment_size();
      double count = 1.0;
      for (int k = 2; k <= d; ++k) count *= k;
      if (count > static_cast<double>(cap))
        throw InputError("output space has more than " + std::to_string(cap) + " elements");
      Vector ranks(d);
      for (int j = 0; j < d; ++j) ranks[j] = j + 1;
      do {
        out.push_back(ranks);
      } while (std::next_permutation(ranks.data(), ranks.data() + d));
      return out;
    }
    case SpaceKind::explicit_finite:
      if (space.points().size() > cap)
        throw InputError("output space has more than " + std::to_string(cap) + " elements");
      return space.points();
    case SpaceKind::flow_polytope:
      throw InputError("cannot enumerate a continuous output space");
  }
  return out;
}

}  // namespace ecrm
