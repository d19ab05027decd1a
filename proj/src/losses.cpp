#include "ecrm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecrm/flow_solvers.hpp"

namespace ecrm {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::zero_one: return "zero_one";
    case LossKind::hamming: return "hamming";
    case LossKind::hierarchical: return "hierarchical";
    case LossKind::footrule: return "footrule";
    case LossKind::absolute: return "absolute";
    case LossKind::square: return "square";
  }
  return "?";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "zero_one" || name == "zero-one") return LossKind::zero_one;
  if (name == "hamming") return LossKind::hamming;
  if (name == "hierarchical") return LossKind::hierarchical;
  if (name == "footrule") return LossKind::footrule;
  if (name == "absolute") return LossKind::absolute;
  if (name == "square") return LossKind::square;
  throw InputError("unknown loss '" + name + "'");
}

LossSpec LossSpec::hierarchical(const HierarchyDag& dag) {
  return hierarchical(dag, sibling_weights(dag));
}

LossSpec LossSpec::hierarchical(const HierarchyDag& dag, Vector c) {
  if (!dag.is_arborescence())
    throw InputError("the hierarchical loss needs an arborescence (single root, one parent each)");
  if (c.size() != dag.size()) throw InputError("hierarchical loss: one penalty per node needed");
  return {LossKind::hierarchical, dag, std::move(c)};
}

namespace {

void check_same_length(const Vector& y, const Vector& yp) {
  if (y.size() != yp.size())
    throw InputError("loss arguments differ in length: " + std::to_string(y.size()) + " vs " +
                     std::to_string(yp.size()));
}

void check_feasible_pair(const HierarchyDag& dag, const Vector& c, const Vector& y,
                         const Vector& yp) {
  if (c.size() != dag.size()) throw InputError("hierarchical loss: one penalty per node needed");
  if (y.size() != dag.size() || yp.size() != dag.size())
    throw InputError("hierarchical loss: label length does not match the hierarchy");
  const auto space = OutputSpace::hierarchy(dag);
  if (!is_feasible(space, y) || !is_feasible(space, yp))
    throw InputError("hierarchical loss: label violates the hierarchy");
}

void check_permutation(const Vector& s) {
  std::vector<char> seen(s.size(), 0);
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const double r = s[j];
    if (r != std::floor(r) || r < 1 || r > static_cast<double>(s.size()) ||
        seen[static_cast<std::size_t>(r) - 1])
      throw InputError("footrule: argument is not a permutation of 1..d");
    seen[static_cast<std::size_t>(r) - 1] = 1;
  }
}

}  // namespace

double zero_one(const Vector& y, const Vector& yp) {
  check_same_length(y, yp);
  return y == yp ? 0.0 : 1.0;
}

double hamming(const Vector& y, const Vector& yp) {
  check_same_length(y, yp);
  return static_cast<double>((y.array() != yp.array()).count());
}

Vector sibling_weights(const HierarchyDag& dag) {
  const int root = dag.root();
  Vector c = Vector::Zero(dag.size());
  c[root] = 1.0;
  for (int j : dag.topological_order()) {
    const auto& kids = dag.children(j);
    for (int k : kids) c[k] = c[j] / static_cast<double>(kids.size());
  }
  return c;
}

double hierarchical_loss(const HierarchyDag& dag, const Vector& c, const Vector& y,
                         const Vector& yp) {
  check_feasible_pair(dag, c, y, yp);
  double total = 0.0;
  for (int j = 0; j < dag.size(); ++j) {
    if (y[j] == yp[j]) continue;
    bool ancestors_agree = true;
    for (int k : dag.ancestors(j))
      if (y[k] != yp[k]) {
        ancestors_agree = false;
        break;
      }
    if (ancestors_agree) total += c[j];
  }
  return total;
}

double hierarchical_loss_closed(const HierarchyDag& dag, const Vector& c, const Vector& y,
                                const Vector& yp) {
  check_feasible_pair(dag, c, y, yp);
  const int s = dag.root();
  double total = c[s] * (y[s] + yp[s] - 2.0 * yp[s] * y[s]);
  for (const auto& [j, k] : dag.arcs())
    total += c[k] * (yp[k] * y[j] + (yp[j] - yp[j] * yp[k] - yp[k]) * y[k]);
  return total;
}

double footrule(const Vector& sigma, const Vector& sigmap) {
  check_same_length(sigma, sigmap);
  check_permutation(sigma);
  check_permutation(sigmap);
  return (sigma - sigmap).cwiseAbs().sum();
}

double vector_loss(LossKind kind, const Vector& y, const Vector& yp) {
  check_same_length(y, yp);
  switch (kind) {
    case LossKind::absolute: return (y - yp).cwiseAbs().sum();
    case LossKind::square: return (y - yp).squaredNorm();
    default: throw InputError("vector_loss supports absolute and square only");
  }
}

double LossSpec::operator()(const Vector& y, const Vector& yp) const {
  switch (kind) {
    case LossKind::zero_one: return ecrm::zero_one(y, yp);
    case LossKind::hamming: return ecrm::hamming(y, yp);
    case LossKind::hierarchical:
      if (!hierarchy) throw InputError("hierarchical loss without a hierarchy");
      return hierarchical_loss(*hierarchy, node_weights, y, yp);
    case LossKind::footrule: return ecrm::footrule(y, yp);
    case LossKind::absolute:
    case LossKind::square: return vector_loss(kind, y, yp);
  }
  return 0.0;
}

double weighted_risk(const LossSpec& loss, const Vector& y, const Matrix& labels,
                     const Vector& weights) {
  if (labels.rows() != weights.size())
    throw InputError("weights and labels disagree on the number of samples");
  double total = 0.0;
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    const Vector yi = labels.row(i).transpose();
    total += weights[i] * loss(y, yi);
  }
  return total;
}

namespace {

// max over pairs (y, y') of the hierarchical loss: at node j either the pair
// disagrees at j, or both pick 1 and the children contribute independently.
double hierarchical_sup(const HierarchyDag& dag, const Vector& c, int j) {
  double below = 0.0;
  for (int k : dag.children(j)) below += hierarchical_sup(dag, c, k);
  return std::max(c[j], below);
}

double pairwise_sup(const LossSpec& loss, const std::vector<Vector>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) best = std::max(best, loss(pts[i], pts[j]));
  return best;
}

constexpr std::size_t kPairwiseCap = 2000;

}  // namespace

double loss_bound(const LossSpec& loss, const OutputSpace& space) {
  if (space.kind() == SpaceKind::explicit_finite) return pairwise_sup(loss, space.points());
  switch (loss.kind) {
    case LossKind::zero_one: return 1.0;
    case LossKind::hamming: return static_cast<double>(space.dim());
    case LossKind::hierarchical:
      return hierarchical_sup(*loss.hierarchy, loss.node_weights, loss.hierarchy->root());
    case LossKind::footrule: {
      const double d = space.dim();
      return std::floor(d * d / 2.0);
    }
    case LossKind::absolute:
    case LossKind::square: {
      if (space.kind() == SpaceKind::flow_polytope) {
        // Both losses are convex, so their maximum over pairs of flows sits at
        // a pair of vertices (unit path flows), where they coincide.
        const auto& net = space.network();
        try {
          return pairwise_sup(loss, enumerate_paths(net, kPairwiseCap));
        } catch (const InputError&) {
          return 2.0 * static_cast<double>(longest_path_arcs(net));
        }
      }
      return pairwise_sup(loss, enumerate_space(space, kPairwiseCap));
    }
  }
  return 0.0;
}

AdditiveCoefficients additive_coefficients(const LossSpec& loss, const Matrix& labels,
                                           const Vector& weights) {
  if (labels.rows() != weights.size())
    throw InputError("weights and labels disagree on the number of samples");
  const auto m = labels.rows();
  const auto d = labels.cols();
  AdditiveCoefficients out;
  switch (loss.kind) {
    case LossKind::hamming: {
      // l_j(1, y') - l_j(0, y') = 1 - 2 y'_j and l_j(0, y') = y'_j.
      out.coefficients = (Vector::Ones(d) * weights.sum() -
                          2.0 * labels.transpose() * weights);
      out.offset = weights.dot(labels.rowwise().sum());
      return out;
    }
    case LossKind::hierarchical: {
      const auto& dag = *loss.hierarchy;
      const Vector& c = loss.node_weights;
      if (d != dag.size()) throw InputError("label length does not match the hierarchy");
      const int s = dag.root();
      out.coefficients = Vector::Zero(d);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double w = weights[i];
        const auto yp = labels.row(i);
        out.coefficients[s] += w * c[s] * (1.0 - 2.0 * yp[s]);
        out.offset += w * c[s] * yp[s];
        for (const auto& [j, k] : dag.arcs()) {
          out.coefficients[j] += w * c[k] * yp[k];
          out.coefficients[k] += w * c[k] * (yp[j] - yp[j] * yp[k] - yp[k]);
        }
      }
      return out;
    }
    case LossKind::footrule: {
      // C_jk = sum_i w_i |k - sigma_i(j)| on the row-major indicator.
      out.coefficients = Vector::Zero(d * d);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
          for (Eigen::Index k = 0; k < d; ++k)
            out.coefficients[j * d + k] +=
                weights[i] * std::abs(static_cast<double>(k + 1) - labels(i, j));
      return out;
    }
    default:
      throw UnsupportedError("loss '" + to_string(loss.kind) +
                             "' has no additive per-coordinate decomposition");
  }
}

}  // namespace ecrm
