#include "ecrm/flow_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

namespace ecrm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit_dag(const FlowNetwork& net) {
  if (!net.is_acyclic()) throw InputError("flow solver needs an acyclic network");
  if (!net.has_unit_terminals())
    throw InputError("flow solver needs a single unit source (b=1) and sink (b=-1)");
}

}  // namespace

namespace {

// Shortest s-t path by dynamic programming in topological order, with
// buffers kept between calls.
class PathOracle {
 public:
  explicit PathOracle(const FlowNetwork& net)
      : net_(net),
        order_(net.topological_order()),
        dist_(static_cast<std::size_t>(net.node_count())),
        pred_(static_cast<std::size_t>(net.node_count())) {}

  void solve(const Vector& costs, Vector& y) {
    const int s = net_.source(), t = net_.sink();
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(pred_.begin(), pred_.end(), -1);
    dist_[s] = 0.0;
    for (int v : order_) {
      if (dist_[v] == kInf) continue;
      for (int a : net_.out_arcs(v)) {
        const int h = net_.arcs()[a].head;
        const double nd = dist_[v] + costs[a];
        if (nd < dist_[h] || (nd == dist_[h] && a < pred_[h])) {
          dist_[h] = nd;
          pred_[h] = a;
        }
      }
    }
    if (dist_[t] == kInf) throw InputError("sink is not reachable from the source");
    y.setZero(net_.arc_count());
    for (int v = t; v != s;) {
      const int a = pred_[v];
      y[a] = 1.0;
      v = net_.arcs()[a].tail;
    }
  }

 private:
  const FlowNetwork& net_;
  const std::vector<int>& order_;
  std::vector<double> dist_;
  std::vector<int> pred_;
};

}  // namespace

Vector lmo_flow(const Vector& costs, const FlowNetwork& net) {
  require_unit_dag(net);
  if (costs.size() != net.arc_count())
    throw InputError("lmo: " + std::to_string(costs.size()) + " costs for " +
                     std::to_string(net.arc_count()) + " arcs");
  Vector y;
  PathOracle(net).solve(costs, y);
  return y;
}

std::vector<Vector> enumerate_paths(const FlowNetwork& net, std::size_t cap) {
  require_unit_dag(net);
  std::vector<Vector> out;
  Vector current = Vector::Zero(net.arc_count());
  const int t = net.sink();
  // Iterative DFS over (node, next out-arc position).
  std::vector<std::pair<int, std::size_t>> stack{{net.source(), 0}};
  std::vector<int> arc_stack;
  while (!stack.empty()) {
    auto& [v, pos] = stack.back();
    if (v == t) {
      if (out.size() >= cap)
        throw InputError("network has more than " + std::to_string(cap) + " s-t paths");
      out.push_back(current);
      stack.pop_back();
      if (!arc_stack.empty()) {
        current[arc_stack.back()] = 0.0;
        arc_stack.pop_back();
      }
      continue;
    }
    const auto& outs = net.out_arcs(v);
    if (pos < outs.size()) {
      const int a = outs[pos++];
      current[a] = 1.0;
      arc_stack.push_back(a);
      stack.push_back({net.arcs()[a].head, 0});
    } else {
      stack.pop_back();
      if (!arc_stack.empty()) {
        current[arc_stack.back()] = 0.0;
        arc_stack.pop_back();
      }
    }
  }
  return out;
}

int longest_path_arcs(const FlowNetwork& net) {
  require_unit_dag(net);
  std::vector<int> len(net.node_count(), -1);
  len[net.source()] = 0;
  for (int v : net.topological_order()) {
    if (len[v] < 0) continue;
    for (int a : net.out_arcs(v)) {
      const int h = net.arcs()[a].head;
      len[h] = std::max(len[h], len[v] + 1);
    }
  }
  return std::max(len[net.sink()], 0);
}

Vector PathMixture::point(Eigen::Index arc_count) const {
  Vector y = Vector::Zero(arc_count);
  for (std::size_t k = 0; k < vertices.size(); ++k) y += weights[k] * vertices[k];
  return y;
}

PathMixture decompose_flow(const Vector& y, const FlowNetwork& net) {
  require_unit_dag(net);
  if (y.size() != net.arc_count()) throw InputError("flow length does not match the network");
  Vector rest = y.cwiseMax(0.0);
  PathMixture mix;
  const int s = net.source(), t = net.sink();
  for (int iter = 0; iter <= net.arc_count(); ++iter) {
    std::vector<int> arcs;
    int v = s;
    double bottleneck = kInf;
    while (v != t) {
      int pick = -1;
      for (int a : net.out_arcs(v))
        if (rest[a] > 0.0 && (pick < 0 || rest[a] > rest[pick])) pick = a;
      if (pick < 0) break;
      arcs.push_back(pick);
      bottleneck = std::min(bottleneck, rest[pick]);
      v = net.arcs()[pick].head;
    }
    if (v != t || bottleneck <= 1e-15) break;
    Vector ind = Vector::Zero(net.arc_count());
    for (int a : arcs) {
      ind[a] = 1.0;
      rest[a] -= bottleneck;
    }
    mix.vertices.push_back(std::move(ind));
    mix.weights.push_back(bottleneck);
  }
  if (mix.vertices.empty()) {
    mix.vertices.push_back(lmo_flow(Vector::Zero(net.arc_count()), net));
    mix.weights.push_back(1.0);
    return mix;
  }
  double total = 0.0;
  for (double w : mix.weights) total += w;
  for (double& w : mix.weights) w /= total;
  return mix;
}

ProjectionResult project_onto_flows(const Vector& target, const FlowNetwork& net, double tol,
                                    int max_iters, PathMixture* mixture) {
  require_unit_dag(net);
  const Eigen::Index A = net.arc_count();
  if (target.size() != A) throw InputError("projection target length does not match the network");
  PathOracle oracle(net);
  PathMixture local;
  PathMixture& mix = mixture ? *mixture : local;
  if (mix.vertices.empty()) {
    Vector v;
    oracle.solve(-target, v);
    mix.vertices = {std::move(v)};
    mix.weights = {1.0};
  }
  Vector y = mix.point(A);
  Vector g(A), s(A), dir(A);
  ProjectionResult res;
  for (int it = 0; it < max_iters; ++it) {
    g = y - target;
    oracle.solve(g, s);
    res.gap = g.dot(y - s);
    res.iterations = it;
    if (res.gap <= tol) break;

    std::size_t away = 0;
    double away_score = -kInf;
    for (std::size_t k = 0; k < mix.vertices.size(); ++k) {
      const double score = g.dot(mix.vertices[k]);
      if (score > away_score) {
        away_score = score;
        away = k;
      }
    }
    dir = s - mix.vertices[away];
    const double denom = dir.squaredNorm();
    if (denom == 0.0) break;
    const double step = std::clamp(-g.dot(dir) / denom, 0.0, mix.weights[away]);
    if (step <= 0.0) break;

    std::size_t s_idx = mix.vertices.size();
    for (std::size_t k = 0; k < mix.vertices.size(); ++k)
      if (mix.vertices[k] == s) {
        s_idx = k;
        break;
      }
    if (s_idx == mix.vertices.size()) {
      mix.vertices.push_back(s);
      mix.weights.push_back(0.0);
    }
    mix.weights[s_idx] += step;
    mix.weights[away] -= step;
    if (mix.weights[away] <= 1e-15) {
      mix.vertices.erase(mix.vertices.begin() + static_cast<std::ptrdiff_t>(away));
      mix.weights.erase(mix.weights.begin() + static_cast<std::ptrdiff_t>(away));
      double total = 0.0;
      for (double w : mix.weights) total += w;
      for (double& w : mix.weights) w /= total;
      y = mix.point(A);
    } else {
      y += step * dir;
    }
    if (it % 64 == 63) y = mix.point(A);
  }
  if (max_iters > 0 && res.gap > tol) {
    g = y - target;
    oracle.solve(g, s);
    res.gap = g.dot(y - s);
  }
  res.y = mix.point(A);
  return res;
}

namespace {

void validate_flow_inputs(const Vector& w, const Matrix& labels, const FlowNetwork& net) {
  require_unit_dag(net);
  if (labels.rows() != w.size())
    throw InputError("weights and labels disagree on the number of samples");
  if (labels.cols() != net.arc_count())
    throw InputError("flow labels have " + std::to_string(labels.cols()) + " entries for " +
                     std::to_string(net.arc_count()) + " arcs");
  if (!w.allFinite()) throw InputError("non-finite weights");
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    const Vector yi = labels.row(i).transpose();
    if (!yi.allFinite() || (yi.array() < -1e-9).any() ||
        net.divergence_residual(yi).cwiseAbs().maxCoeff() > 1e-9)
      throw InputError("flow label " + std::to_string(i) + " violates flow conservation");
  }
}

Vector lex_smallest_vertex(const FlowNetwork& net, std::size_t cap) {
  try {
    auto paths = enumerate_paths(net, cap);
    return *std::min_element(paths.begin(), paths.end(), lex_less);
  } catch (const InputError&) {
    return lmo_flow(Vector::Zero(net.arc_count()), net);
  }
}

double sq_objective(const Vector& w, const Matrix& labels, const Vector& y) {
  return w.dot((labels.rowwise() - y.transpose()).rowwise().squaredNorm());
}

double abs_objective(const Vector& w, const Matrix& labels, const Vector& y) {
  return w.dot((labels.rowwise() - y.transpose()).cwiseAbs().rowwise().sum());
}

std::mt19937_64 restart_rng(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  return std::mt19937_64(seq);
}

Vector random_vertex(const FlowNetwork& net, std::uint64_t seed, int restart) {
  auto rng = restart_rng(seed, restart);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector c(net.arc_count());
  for (Eigen::Index a = 0; a < c.size(); ++a) c[a] = normal(rng);
  return lmo_flow(c, net);
}

bool better(double f, const Vector& y, double best_f, const std::optional<Vector>& best_y) {
  if (!best_y) return true;
  if (f < best_f) return true;
  return f == best_f && lex_less(y, *best_y);
}

}  // namespace

InferenceResult solve_flow_sq(const Vector& weights, const Matrix& labels, const FlowNetwork& net,
                              const SolverParams& params) {
  params.validate();
  validate_flow_inputs(weights, labels, net);
  InferenceResult r;
  if ((weights.array() == 0.0).all()) {
    r.y = lex_smallest_vertex(net, params.enumeration_cap);
    r.objective = 0.0;
    r.certificate = Certificate::exact();
    return r;
  }
  const double W = weights.sum();
  const Vector weighted_sum = labels.transpose() * weights;

  if ((weights.array() >= 0.0).all()) {
    // A convex combination of feasible flows is feasible and is the minimizer.
    r.y = weighted_sum / W;
    r.certificate = Certificate::exact();
  } else if (W > 0.0) {
    // W |y - ybar|^2 + const: project ybar onto the polytope.
    const Vector ybar = weighted_sum / W;
    const auto proj = project_onto_flows(ybar, net, params.gap_tol / (2.0 * W), 100000);
    r.y = proj.y;
    r.certificate = Certificate::bounded(std::max(0.0, 2.0 * W * proj.gap));
  } else if (W == 0.0) {
    // Linear objective -2 y^T sum_i w_i y_i + const.
    r.y = lmo_flow(-2.0 * weighted_sum, net);
    r.certificate = Certificate::exact();
  } else {
    // Concave: the minimum sits at a vertex.
    std::optional<Vector> best;
    double best_f = kInf;
    try {
      for (const Vector& v : enumerate_paths(net, params.enumeration_cap)) {
        const double f = sq_objective(weights, labels, v);
        if (better(f, v, best_f, best)) {
          best = v;
          best_f = f;
        }
      }
      r.certificate = Certificate::exact();
    } catch (const InputError&) {
      // Too many paths: vertex descent from several starts.
      for (int k = 0; k < params.restarts; ++k) {
        Vector v = k == 0 ? lmo_flow(-2.0 * weighted_sum, net) : random_vertex(net, params.seed, k);
        double f = sq_objective(weights, labels, v);
        for (int it = 0; it < params.max_iters; ++it) {
          const Vector grad = 2.0 * (W * v - weighted_sum);
          const Vector s = lmo_flow(grad, net);
          const double fs = sq_objective(weights, labels, s);
          if (!(fs < f)) break;
          v = s;
          f = fs;
        }
        if (better(f, v, best_f, best)) {
          best = v;
          best_f = f;
        }
      }
      r.certificate = Certificate::heuristic();
    }
    r.y = *best;
  }
  r.objective = sq_objective(weights, labels, r.y);
  return r;
}

namespace {

// phi_a(t) = sum_i w_i |t - y_ia| for every arc, with sorted breakpoints and
// prefix sums so that values, slopes and neighbouring breakpoints cost
// O(log m) per arc.
class SeparableAbsolute {
 public:
  SeparableAbsolute(const Vector& w, const Matrix& labels)
      : arcs_(labels.cols()), total_(w.sum()) {
    const auto m = labels.rows();
    for (Eigen::Index a = 0; a < labels.cols(); ++a) {
      std::vector<std::pair<double, double>> pts(m);
      for (Eigen::Index i = 0; i < m; ++i) pts[i] = {labels(i, a), w[i]};
      std::sort(pts.begin(), pts.end());
      ArcData& d = arcs_[a];
      d.values.resize(m);
      d.cum_w.assign(m + 1, 0.0);
      d.cum_wv.assign(m + 1, 0.0);
      for (Eigen::Index i = 0; i < m; ++i) {
        d.values[i] = pts[i].first;
        d.cum_w[i + 1] = d.cum_w[i] + pts[i].second;
        d.cum_wv[i + 1] = d.cum_wv[i] + pts[i].second * pts[i].first;
      }
    }
  }

  double value(const Vector& y) const {
    double f = 0.0;
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
      const ArcData& d = arcs_[a];
      const double t = y[static_cast<Eigen::Index>(a)];
      const std::size_t le = upper(d, t);
      const double w_le = d.cum_w[le], wv_le = d.cum_wv[le];
      const double w_gt = d.cum_w.back() - w_le, wv_gt = d.cum_wv.back() - wv_le;
      f += t * (w_le - w_gt) - (wv_le - wv_gt);
    }
    return f;
  }

  // sum_i w_i sign(t - y_ia) with sign(0) = 0.
  void subgradient(const Vector& y, Vector& g) const {
    g.resize(static_cast<Eigen::Index>(arcs_.size()));
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
      const ArcData& d = arcs_[a];
      const double t = y[static_cast<Eigen::Index>(a)];
      const double w_lt = d.cum_w[lower(d, t)];
      const double w_gt = d.cum_w.back() - d.cum_w[upper(d, t)];
      g[static_cast<Eigen::Index>(a)] = w_lt - w_gt;
    }
  }

  // Derivative when increasing y_a from t.
  double right_slope(std::size_t a, double t) const {
    const ArcData& d = arcs_[a];
    const double w_le = d.cum_w[upper(d, t)];
    return w_le - (d.cum_w.back() - w_le);
  }
  // Derivative when decreasing y_a from t (as d/dt from the left).
  double left_slope(std::size_t a, double t) const {
    const ArcData& d = arcs_[a];
    const double w_lt = d.cum_w[lower(d, t)];
    return w_lt - (d.cum_w.back() - w_lt);
  }
  double next_above(std::size_t a, double t) const {
    const ArcData& d = arcs_[a];
    const std::size_t i = upper(d, t);
    return i < d.values.size() ? d.values[i] : kInf;
  }
  double next_below(std::size_t a, double t) const {
    const ArcData& d = arcs_[a];
    const std::size_t i = lower(d, t);
    return i > 0 ? d.values[i - 1] : -kInf;
  }
  double total_weight() const { return total_; }

 private:
  struct ArcData {
    std::vector<double> values;
    std::vector<double> cum_w;
    std::vector<double> cum_wv;
  };
  static std::size_t upper(const ArcData& d, double t) {
    return static_cast<std::size_t>(std::upper_bound(d.values.begin(), d.values.end(), t) -
                                    d.values.begin());
  }
  static std::size_t lower(const ArcData& d, double t) {
    return static_cast<std::size_t>(std::lower_bound(d.values.begin(), d.values.end(), t) -
                                    d.values.begin());
  }
  std::vector<ArcData> arcs_;
  double total_;
};

// Moves flow around residual cycles whose marginal cost is negative, each
// time until some arc reaches its next breakpoint. Stops at a point with no
// improving cycle, which is globally optimal when every phi_a is convex.
Vector cancel_negative_cycles(Vector y, const SeparableAbsolute& obj, const FlowNetwork& net,
                              double cost_tol, int max_rounds) {
  struct ResidualArc {
    int from, to, arc;
    bool forward;
    double cost, cap, target;
  };
  const int n = net.node_count();
  const int A = net.arc_count();
  std::vector<ResidualArc> edges;
  edges.reserve(2 * A);
  for (int round = 0; round < max_rounds; ++round) {
    edges.clear();
    for (int a = 0; a < A; ++a) {
      const auto [tail, head] = net.arcs()[a];
      const double t = y[a];
      const double up = obj.next_above(a, t);
      const double fwd_cost = obj.right_slope(a, t);
      const double bwd_cost = -obj.left_slope(a, t);
      // At a concave kink both directions can look improving; a cycle using
      // the arc both ways would not move anything, so keep the better one.
      const bool kink = fwd_cost + bwd_cost < 0.0;
      const bool keep_fwd = !kink || t <= 0.0 || fwd_cost <= bwd_cost;
      const bool keep_bwd = t > 0.0 && (!kink || bwd_cost < fwd_cost);
      if (keep_fwd) edges.push_back({tail, head, a, true, fwd_cost, up - t, up});
      if (keep_bwd) {
        const double down = std::max(obj.next_below(a, t), 0.0);
        edges.push_back({head, tail, a, false, bwd_cost, t - down, down});
      }
    }
    // Bellman-Ford from a virtual source connected to every node.
    std::vector<double> dist(n, 0.0);
    std::vector<int> pred(n, -1);
    int touched = -1;
    for (int pass = 0; pass < n; ++pass) {
      touched = -1;
      for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const auto& r = edges[e];
        if (dist[r.from] + r.cost < dist[r.to] - cost_tol) {
          dist[r.to] = dist[r.from] + r.cost;
          pred[r.to] = e;
          touched = r.to;
        }
      }
      if (touched < 0) break;
    }
    if (touched < 0) break;
    int v = touched;
    for (int k = 0; k < n; ++k) v = edges[pred[v]].from;
    std::vector<int> cycle;
    int u = v;
    do {
      const int e = pred[u];
      if (e < 0) break;
      cycle.push_back(e);
      u = edges[e].from;
    } while (u != v && static_cast<int>(cycle.size()) <= n);
    if (u != v) break;
    double cost = 0.0, cap = kInf;
    for (int e : cycle) {
      cost += edges[e].cost;
      cap = std::min(cap, edges[e].cap);
    }
    if (!(cost < -cost_tol) || !(cap > 0.0) || cap == kInf) break;
    for (int e : cycle) {
      const auto& r = edges[e];
      if (r.cap == cap)
        y[r.arc] = r.target;  // lands exactly on the breakpoint
      else
        y[r.arc] += r.forward ? cap : -cap;
    }
  }
  return y;
}

}  // namespace

InferenceResult solve_flow_abs(const Vector& weights, const Matrix& labels,
                               const FlowNetwork& net, const SolverParams& params) {
  params.validate();
  validate_flow_inputs(weights, labels, net);
  const Eigen::Index A = net.arc_count();
  InferenceResult r;
  if ((weights.array() == 0.0).all()) {
    r.y = lex_smallest_vertex(net, params.enumeration_cap);
    r.objective = 0.0;
    r.certificate = Certificate::exact();
    return r;
  }
  const SeparableAbsolute obj(weights, labels);
  const bool convex = (weights.array() >= 0.0).all();
  const double cost_tol = 1e-12 * (1.0 + weights.cwiseAbs().sum());
  // Iterates stay exact path mixtures, so inexact inner projections only
  // cost descent quality, never feasibility.
  const double proj_tol = 1e-9;
  const int proj_iters = 10;

  std::vector<Vector> starts;
  const Vector positive = weights.cwiseMax(0.0);
  if (positive.sum() > 0.0) starts.push_back(labels.transpose() * positive / positive.sum());
  if (!convex) {
    for (int k = static_cast<int>(starts.size()); k < params.restarts; ++k)
      starts.push_back(random_vertex(net, params.seed, k));
  }

  std::optional<Vector> best;
  double best_f = kInf;
  for (const Vector& start : starts) {
    PathMixture mix = decompose_flow(start, net);
    Vector y = mix.point(A);
    Vector local_best = y;
    double local_f = obj.value(y);
    Vector g, target;
    for (int t = 0; t < params.max_iters; ++t) {
      obj.subgradient(y, g);
      const double norm = g.norm();
      if (norm == 0.0) break;
      const double step = params.step_a / (1.0 + t * params.step_b);
      target = y - (step / norm) * g;
      const auto proj = project_onto_flows(target, net, proj_tol, proj_iters, &mix);
      y = proj.y;
      const double f = obj.value(y);
      if (f < local_f) {
        local_f = f;
        local_best = y;
      }
    }
    const Vector polished = cancel_negative_cycles(local_best, obj, net, cost_tol, 100000);
    const double f = abs_objective(weights, labels, polished);
    if (better(f, polished, best_f, best)) {
      best = polished;
      best_f = f;
    }
  }
  r.y = *best;
  r.objective = best_f;
  r.certificate = convex ? Certificate::exact() : Certificate::heuristic();
  return r;
}

}  // namespace ecrm
