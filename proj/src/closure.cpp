#include "ecrm/closure.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

namespace ecrm {

MaxFlow::MaxFlow(int node_count, double eps)
    : graph_(node_count), level_(node_count), next_(node_count), eps_(eps) {}

void MaxFlow::add_edge(int from, int to, double capacity) {
  graph_[from].push_back({to, static_cast<int>(graph_[to].size()), capacity});
  graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, 0.0});
}

bool MaxFlow::bfs(int s, int t) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<int> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const Edge& e : graph_[v])
      if (e.cap > eps_ && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        q.push(e.to);
      }
  }
  return level_[t] >= 0;
}

double MaxFlow::dfs(int v, int t, double pushed) {
  if (v == t) return pushed;
  for (; next_[v] < graph_[v].size(); ++next_[v]) {
    Edge& e = graph_[v][next_[v]];
    if (e.cap <= eps_ || level_[e.to] != level_[v] + 1) continue;
    const double got = dfs(e.to, t, std::min(pushed, e.cap));
    if (got > 0.0) {
      e.cap -= got;
      graph_[e.to][e.rev].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::solve(int source, int sink) {
  double flow = 0.0;
  while (bfs(source, sink)) {
    std::fill(next_.begin(), next_.end(), 0);
    while (true) {
      const double f = dfs(source, sink, std::numeric_limits<double>::infinity());
      if (f <= 0.0) break;
      flow += f;
    }
  }
  return flow;
}

std::vector<char> MaxFlow::source_side(int source) const {
  std::vector<char> seen(graph_.size(), 0);
  std::vector<int> stack{source};
  seen[source] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const Edge& e : graph_[v])
      if (e.cap > eps_ && !seen[e.to]) {
        seen[e.to] = 1;
        stack.push_back(e.to);
      }
  }
  return seen;
}

std::vector<char> MaxFlow::reaches_sink(int sink) const {
  // u can reach v in the residual graph iff the edge u->v has capacity left;
  // walk backwards from the sink along such edges.
  std::vector<char> seen(graph_.size(), 0);
  std::vector<int> stack{sink};
  seen[sink] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const Edge& e : graph_[v]) {
      const Edge& back = graph_[e.to][e.rev];  // e.to -> v
      if (back.cap > eps_ && !seen[e.to]) {
        seen[e.to] = 1;
        stack.push_back(e.to);
      }
    }
  }
  return seen;
}

namespace {

struct ClosureSolve {
  std::vector<char> minimal;  // smallest optimal closure
  std::vector<char> maximal;  // largest optimal closure
};

ClosureSolve min_cut_closure(const Vector& costs, const HierarchyDag& dag,
                             const std::vector<signed char>& fixed, double big, double eps) {
  const int d = dag.size();
  const int s = d, t = d + 1;
  MaxFlow mf(d + 2, eps);
  for (int j = 0; j < d; ++j) {
    if (costs[j] < 0.0) mf.add_edge(s, j, -costs[j]);
    if (costs[j] > 0.0) mf.add_edge(j, t, costs[j]);
    if (fixed[j] == 0) mf.add_edge(j, t, big);
    if (fixed[j] == 1) mf.add_edge(s, j, big);
  }
  // Selecting a child forces its parent.
  for (const auto& [parent, child] : dag.arcs()) mf.add_edge(child, parent, big);
  mf.solve(s, t);
  ClosureSolve out;
  auto src = mf.source_side(s);
  auto snk = mf.reaches_sink(t);
  out.minimal.assign(src.begin(), src.begin() + d);
  out.maximal.resize(d);
  for (int j = 0; j < d; ++j) out.maximal[j] = snk[j] ? 0 : 1;
  return out;
}

double closure_cost(const Vector& costs, const std::vector<char>& sel) {
  double v = 0.0;
  for (std::size_t j = 0; j < sel.size(); ++j)
    if (sel[j]) v += costs[static_cast<Eigen::Index>(j)];
  return v;
}

bool respects(const HierarchyDag& dag, const std::vector<char>& sel,
              const std::vector<signed char>& fixed) {
  for (const auto& [parent, child] : dag.arcs())
    if (sel[child] && !sel[parent]) return false;
  for (std::size_t j = 0; j < sel.size(); ++j)
    if (fixed[j] >= 0 && sel[j] != fixed[j]) return false;
  return true;
}

}  // namespace

Vector solve_hierarchy(const Vector& costs, const HierarchyDag& dag) {
  const int d = dag.size();
  if (costs.size() != d)
    throw InputError("hierarchy solver: " + std::to_string(costs.size()) + " costs for " +
                     std::to_string(d) + " nodes");
  if (!costs.allFinite()) throw InputError("hierarchy solver: non-finite cost");

  const double total = costs.cwiseAbs().sum();
  const double big = 1.0 + 2.0 * total;
  const double eps = 1e-13 * (1.0 + total);
  const double tol = 1e-12 * (1.0 + total);

  std::vector<signed char> fixed(d, -1);
  ClosureSolve base = min_cut_closure(costs, dag, fixed, big, eps);
  const double opt = closure_cost(costs, base.minimal);

  // Every optimal closure lies between the minimal and the maximal one, so
  // only the nodes in between need a lexicographic decision.
  std::vector<char> y = base.minimal;
  bool refined = false;
  for (int j = 0; j < d; ++j) {
    if (base.minimal[j] || !base.maximal[j]) continue;
    refined = true;
    fixed[j] = 0;
    const ClosureSolve trial = min_cut_closure(costs, dag, fixed, big, eps);
    if (!respects(dag, trial.minimal, fixed) || closure_cost(costs, trial.minimal) > opt + tol)
      fixed[j] = 1;
  }
  if (refined) {
    y = min_cut_closure(costs, dag, fixed, big, eps).minimal;
  }

  Vector out(d);
  for (int j = 0; j < d; ++j) out[j] = y[j] ? 1.0 : 0.0;
  return out;
}

}  // namespace ecrm
