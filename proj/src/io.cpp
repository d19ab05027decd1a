#include "ecrm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace ecrm {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  // Next non-blank line, split into tokens. False at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      tokens.clear();
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::vector<std::string> expect(const std::string& what) {
    std::vector<std::string> t;
    if (!next(t)) fail("unexpected end of file, expected " + what);
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(name_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

  double number(const std::string& tok) const {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) fail("cannot parse '" + tok + "' as a number");
    if (!std::isfinite(v)) fail("non-finite value '" + tok + "'");
    return v;
  }

  long long integer(const std::string& tok) const {
    long long v = 0;
    const char* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) fail("cannot parse '" + tok + "' as an integer");
    return v;
  }

  void keyword(const std::vector<std::string>& t, std::size_t i, const std::string& kw) const {
    if (t.size() <= i || t[i] != kw) fail("expected '" + kw + "'");
  }

  std::vector<double> row(const std::vector<std::string>& t) const {
    std::vector<double> r;
    r.reserve(t.size());
    for (const auto& tok : t) r.push_back(number(tok));
    return r;
  }

  Matrix rows(std::size_t count, Eigen::Index width, const std::string& what) {  // fixed width
    Matrix M(static_cast<Eigen::Index>(count), width);
    for (std::size_t i = 0; i < count; ++i) {
      const auto t = expect(what);
      if (width >= 0 && static_cast<Eigen::Index>(t.size()) != width)
        fail(what + " row has " + std::to_string(t.size()) + " values, expected " +
             std::to_string(width));
      for (Eigen::Index j = 0; j < width; ++j) M(static_cast<Eigen::Index>(i), j) = number(t[j]);
    }
    return M;
  }

  // count rows of equal, arbitrary width.
  Matrix block(std::size_t count, const std::string& what) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < count; ++i) {
      rows.push_back(row(expect(what)));
      if (rows.back().size() != rows.front().size())
        fail(what + " row has " + std::to_string(rows.back().size()) + " values, expected " +
             std::to_string(rows.front().size()));
    }
    const auto width = rows.empty() ? 0 : rows.front().size();
    Matrix M(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < width; ++j)
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return M;
  }

  int line() const { return line_no_; }
  const std::string& name() const { return name_; }

 private:
  std::istream& in_;
  std::string name_;
  int line_no_ = 0;
};

void expect_end(LineReader& r) {
  std::vector<std::string> extra;
  if (r.next(extra)) r.fail("unexpected trailing content");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& r) {
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    if (j) out << ' ';
    out << format_double(r[j]);
  }
  out << '\n';
}

template <typename Check>
Matrix load_checked(const std::string& path, Check check, const char* what) {
  const Matrix M = load_matrix(path);
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      if (!check(M(i, j)))
        throw InputError(path + ":" + std::to_string(i + 1) + ": value " +
                         format_double(M(i, j)) + " is not " + what);
  return M;
}

}  // namespace

Matrix read_matrix(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> t;
  while (r.next(t)) {
    rows.push_back(r.row(t));
    if (rows.back().size() != rows.front().size())
      r.fail("row has " + std::to_string(rows.back().size()) + " values, expected " +
             std::to_string(rows.front().size()));
  }
  if (rows.empty()) throw InputError(name + ": empty file");
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

Matrix load_matrix(const std::string& path) {
  auto in = open_in(path);
  return read_matrix(in, path);
}

void write_matrix(std::ostream& out, const Matrix& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) write_row(out, M.row(i));
}

void save_matrix(const std::string& path, const Matrix& M) {
  auto out = open_out(path);
  write_matrix(out, M);
  if (!out) throw InputError("failed writing '" + path + "'");
}

Matrix load_features(const std::string& path) { return load_matrix(path); }

Matrix load_binary_labels(const std::string& path) {
  return load_checked(path, [](double v) { return v == 0.0 || v == 1.0; }, "0 or 1");
}

Matrix load_sign_labels(const std::string& path) {
  Matrix M = load_checked(path, [](double v) { return v == -1.0 || v == 1.0; }, "-1 or +1");
  if (M.cols() != 1) throw InputError(path + ": sign labels need one value per line");
  return M;
}

Matrix load_permutations(const std::string& path) {
  const Matrix M = load_matrix(path);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::vector<char> seen(static_cast<std::size_t>(M.cols()), 0);
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double v = M(i, j);
      const auto k = static_cast<long long>(v);
      if (v != static_cast<double>(k) || k < 1 || k > M.cols() || seen[k - 1])
        throw InputError(path + ":" + std::to_string(i + 1) + ": not a permutation of 1.." +
                         std::to_string(M.cols()));
      seen[k - 1] = 1;
    }
  }
  return M;
}

Matrix load_flows(const std::string& path) {
  return load_checked(path, [](double v) { return v >= 0.0; }, "a nonnegative flow");
}

Matrix load_labels(const std::string& path, const OutputSpace& space) {
  Matrix M;
  switch (space.kind()) {
    case SpaceKind::hierarchy: M = load_binary_labels(path); break;
    case SpaceKind::assignment: M = load_permutations(path); break;
    case SpaceKind::flow_polytope: M = load_flows(path); break;
    case SpaceKind::explicit_finite: M = load_matrix(path); break;
  }
  if (M.cols() != space.dim())
    throw InputError(path + ": labels have " + std::to_string(M.cols()) + " entries, the " +
                     to_string(space.kind()) + " space expects " + std::to_string(space.dim()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    if (!is_feasible(space, M.row(i).transpose()))
      throw InputError(path + ":" + std::to_string(i + 1) + ": label is not a feasible " +
                       to_string(space.kind()) + " output");
  return M;
}

HierarchyDag read_hierarchy(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  std::vector<std::string> t;
  std::vector<HierarchyDag::Arc> arcs;
  long long declared = -1;
  long long max_id = -1;
  bool first = true;
  while (r.next(t)) {
    if (first && t[0] == "nodes") {
      if (t.size() != 2) r.fail("expected 'nodes N'");
      declared = r.integer(t[1]);
      if (declared < 1) r.fail("node count must be positive");
      first = false;
      continue;
    }
    first = false;
    if (t.size() != 2) r.fail("expected 'parent child'");
    const long long p = r.integer(t[0]), c = r.integer(t[1]);
    if (p < 0 || c < 0) r.fail("node ids must be nonnegative");
    if (declared >= 0 && (p >= declared || c >= declared))
      r.fail("node id exceeds the declared count " + std::to_string(declared));
    if (p == c) r.fail("self-loop on node " + std::to_string(p) + " creates a cycle");
    if (p > 1'000'000'000 || c > 1'000'000'000) r.fail("node id too large");
    arcs.emplace_back(static_cast<int>(p), static_cast<int>(c));
    max_id = std::max({max_id, p, c});
  }
  const long long n = declared >= 0 ? declared : max_id + 1;
  if (n < 1) throw InputError(name + ": empty hierarchy");
  try {
    return HierarchyDag(static_cast<int>(n), std::move(arcs));
  } catch (const InputError& e) {
    throw InputError(name + ": " + e.what());
  }
}

HierarchyDag load_hierarchy(const std::string& path) {
  auto in = open_in(path);
  return read_hierarchy(in, path);
}

void write_hierarchy(std::ostream& out, const HierarchyDag& dag) {
  out << "nodes " << dag.size() << '\n';
  for (const auto& [p, c] : dag.arcs()) out << p << ' ' << c << '\n';
}

FlowNetwork read_network(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  auto head = r.expect("'nodes N arcs M'");
  if (head.size() != 4) r.fail("expected 'nodes N arcs M'");
  r.keyword(head, 0, "nodes");
  r.keyword(head, 2, "arcs");
  const long long n = r.integer(head[1]), m = r.integer(head[3]);
  if (n < 1 || m < 0) r.fail("invalid node or arc count");
  std::vector<FlowArc> arcs;
  for (long long a = 0; a < m; ++a) {
    const auto t = r.expect("'tail head'");
    if (t.size() != 2) r.fail("expected 'tail head'");
    const long long u = r.integer(t[0]), v = r.integer(t[1]);
    if (u < 0 || v < 0 || u >= n || v >= n) r.fail("arc endpoint outside 0.." + std::to_string(n - 1));
    arcs.push_back({static_cast<int>(u), static_cast<int>(v)});
  }
  Vector b = Vector::Zero(n);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (long long k = 0; k < n; ++k) {
    const auto t = r.expect("'node b'");
    if (t.size() != 2) r.fail("expected 'node b'");
    const long long v = r.integer(t[0]);
    if (v < 0 || v >= n) r.fail("node id outside 0.." + std::to_string(n - 1));
    if (seen[v]) r.fail("node " + std::to_string(v) + " listed twice");
    seen[v] = 1;
    b[v] = r.number(t[1]);
  }
  expect_end(r);
  try {
    return FlowNetwork(static_cast<int>(n), std::move(arcs), std::move(b));
  } catch (const InputError& e) {
    throw InputError(name + ": " + e.what());
  }
}

FlowNetwork load_network(const std::string& path) {
  auto in = open_in(path);
  return read_network(in, path);
}

void write_network(std::ostream& out, const FlowNetwork& net) {
  out << "nodes " << net.node_count() << " arcs " << net.arc_count() << '\n';
  for (const auto& a : net.arcs()) out << a.tail << ' ' << a.head << '\n';
  for (int v = 0; v < net.node_count(); ++v) out << v << ' ' << format_double(net.supply()[v]) << '\n';
}

void save_network(const std::string& path, const FlowNetwork& net) {
  auto out = open_out(path);
  write_network(out, net);
}

namespace {

void write_header(std::ostream& out, const KernelSpec& k, double lambda, Eigen::Index m,
                  Eigen::Index p, InterceptMode intercept) {
  out << "ECRM-MODEL 1\n";
  out << "kernel " << to_string(k.kind);
  if (k.kind == KernelKind::rbf) out << ' ' << format_double(k.gamma);
  out << '\n';
  out << "lambda " << format_double(lambda) << " m " << m << " p " << p << " intercept "
      << to_string(intercept) << '\n';
}

void write_space(std::ostream& out, const OutputSpace& space) {
  switch (space.kind()) {
    case SpaceKind::hierarchy: {
      const auto& dag = space.dag();
      out << "space hierarchy " << dag.size() << ' ' << dag.arcs().size() << '\n';
      for (const auto& [p, c] : dag.arcs()) out << p << ' ' << c << '\n';
      break;
    }
    case SpaceKind::assignment:
      out << "space assignment " << space.dim() << '\n';
      break;
    case SpaceKind::flow_polytope:
      out << "space flow\n";
      write_network(out, space.network());
      break;
    case SpaceKind::explicit_finite:
      out << "space finite " << space.points().size() << ' ' << space.dim() << '\n';
      for (const auto& pt : space.points()) write_row(out, pt.transpose());
      break;
  }
}

OutputSpace read_space(LineReader& r) {
  const auto t = r.expect("'space ...'");
  r.keyword(t, 0, "space");
  if (t.size() < 2) r.fail("missing space kind");
  const std::string& kind = t[1];
  try {
    if (kind == "hierarchy") {
      if (t.size() != 4) r.fail("expected 'space hierarchy N M'");
      const long long n = r.integer(t[2]), m = r.integer(t[3]);
      if (n < 1 || m < 0) r.fail("invalid hierarchy size");
      std::vector<HierarchyDag::Arc> arcs;
      for (long long a = 0; a < m; ++a) {
        const auto at = r.expect("'parent child'");
        if (at.size() != 2) r.fail("expected 'parent child'");
        arcs.emplace_back(static_cast<int>(r.integer(at[0])), static_cast<int>(r.integer(at[1])));
      }
      return OutputSpace::hierarchy(HierarchyDag(static_cast<int>(n), std::move(arcs)));
    }
    if (kind == "assignment") {
      if (t.size() != 3) r.fail("expected 'space assignment d'");
      const long long d = r.integer(t[2]);
      if (d < 1) r.fail("assignment size must be positive");
      return OutputSpace::assignment(static_cast<int>(d));
    }
    if (kind == "flow") {
      auto head = r.expect("'nodes N arcs M'");
      if (head.size() != 4) r.fail("expected 'nodes N arcs M'");
      r.keyword(head, 0, "nodes");
      r.keyword(head, 2, "arcs");
      const long long n = r.integer(head[1]), m = r.integer(head[3]);
      if (n < 1 || m < 0) r.fail("invalid node or arc count");
      std::vector<FlowArc> arcs;
      for (long long a = 0; a < m; ++a) {
        const auto at = r.expect("'tail head'");
        if (at.size() != 2) r.fail("expected 'tail head'");
        arcs.push_back({static_cast<int>(r.integer(at[0])), static_cast<int>(r.integer(at[1]))});
      }
      Vector b = Vector::Zero(n);
      for (long long k = 0; k < n; ++k) {
        const auto bt = r.expect("'node b'");
        if (bt.size() != 2) r.fail("expected 'node b'");
        const long long v = r.integer(bt[0]);
        if (v < 0 || v >= n) r.fail("node id out of range");
        b[v] = r.number(bt[1]);
      }
      return OutputSpace::flow(FlowNetwork(static_cast<int>(n), std::move(arcs), std::move(b)));
    }
    if (kind == "finite") {
      if (t.size() != 4) r.fail("expected 'space finite K D'");
      const long long k = r.integer(t[2]), d = r.integer(t[3]);
      if (k < 1 || d < 1) r.fail("invalid finite space size");
      const Matrix pts = r.rows(static_cast<std::size_t>(k), d, "point");
      std::vector<Vector> points;
      for (Eigen::Index i = 0; i < pts.rows(); ++i) points.push_back(pts.row(i).transpose());
      return OutputSpace::finite(std::move(points));
    }
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(r.name(), 0) == 0) throw;
    r.fail(msg);
  }
  r.fail("unknown space kind '" + kind + "'");
}

}  // namespace

void write_model(std::ostream& out, const TrainedModel& model) {
  const auto& ridge = model.ridge;
  write_header(out, ridge.kernel(), ridge.lambda(), ridge.size(), ridge.dim(), ridge.intercept());
  write_matrix(out, ridge.inputs());
  write_matrix(out, *model.labels);
  write_space(out, model.space);
}

void write_model(std::ostream& out, const AdditiveModel& model) {
  const Eigen::Index m = model.inputs.rows(), d = model.dag.size();
  write_header(out, model.kernel, model.lambda, m, model.inputs.cols(), InterceptMode::none);
  out << "variant additive\n";
  write_matrix(out, model.inputs);
  out << "neighborhood " << (model.neighbors ? "adjacent" : "self") << '\n';
  // Per sample: alpha(i,k,1) alpha(i,k,0) for every node k.
  Matrix alpha(m, 2 * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    alpha.col(2 * k) = model.alpha1.col(k);
    alpha.col(2 * k + 1) = model.alpha0.col(k);
  }
  write_matrix(out, alpha);
  write_space(out, OutputSpace::hierarchy(model.dag));
}

void save_model(const std::string& path, const TrainedModel& model) {
  auto out = open_out(path);
  write_model(out, model);
  if (!out) throw InputError("failed writing '" + path + "'");
}

void save_model(const std::string& path, const AdditiveModel& model) {
  auto out = open_out(path);
  write_model(out, model);
  if (!out) throw InputError("failed writing '" + path + "'");
}

AnyModel read_model(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  auto t = r.expect("'ECRM-MODEL 1'");
  if (t.size() != 2 || t[0] != "ECRM-MODEL") r.fail("not an ECRM model file");
  if (t[1] != "1") r.fail("unsupported model version '" + t[1] + "'");

  t = r.expect("'kernel ...'");
  r.keyword(t, 0, "kernel");
  KernelSpec kernel;
  try {
    kernel.kind = parse_kernel_kind(t.size() > 1 ? t[1] : "");
  } catch (const InputError& e) {
    r.fail(e.what());
  }
  if (kernel.kind == KernelKind::rbf) {
    if (t.size() != 3) r.fail("rbf kernel needs a gamma");
    kernel.gamma = r.number(t[2]);
  } else if (t.size() != 2) {
    r.fail("linear kernel takes no parameter");
  }

  t = r.expect("'lambda ...'");
  if (t.size() != 8) r.fail("expected 'lambda L m M p P intercept MODE'");
  r.keyword(t, 0, "lambda");
  r.keyword(t, 2, "m");
  r.keyword(t, 4, "p");
  r.keyword(t, 6, "intercept");
  const double lambda = r.number(t[1]);
  const long long m = r.integer(t[3]), p = r.integer(t[5]);
  if (m < 1 || p < 1) r.fail("m and p must be positive");
  InterceptMode intercept{};
  try {
    intercept = parse_intercept_mode(t[7]);
  } catch (const InputError& e) {
    r.fail(e.what());
  }

  // An optional variant line comes before the inputs.
  t = r.expect("inputs");
  bool additive = false;
  if (t[0] == "variant") {
    if (t.size() != 2 || t[1] != "additive") r.fail("unknown model variant");
    additive = true;
    t = r.expect("inputs");
  }
  Matrix X(m, p);
  for (long long i = 0; i < m; ++i) {
    if (i > 0) t = r.expect("inputs");
    if (static_cast<long long>(t.size()) != p)
      r.fail("input row has " + std::to_string(t.size()) + " values, expected " + std::to_string(p));
    for (long long j = 0; j < p; ++j) X(i, j) = r.number(t[j]);
  }

  if (additive) {
    t = r.expect("'neighborhood ...'");
    if (t.size() != 2 || t[0] != "neighborhood" || (t[1] != "adjacent" && t[1] != "self"))
      r.fail("expected 'neighborhood adjacent|self'");
    const bool neighbors = t[1] == "adjacent";
    const Matrix alpha = r.block(static_cast<std::size_t>(m), "alpha");
    const OutputSpace space = read_space(r);
    if (space.kind() != SpaceKind::hierarchy) r.fail("additive models need a hierarchy space");
    const Eigen::Index d = space.dim();
    if (alpha.cols() != 2 * d)
      r.fail("alpha rows have " + std::to_string(alpha.cols()) + " values, expected " +
             std::to_string(2 * d));
    if (!(lambda > 0.0)) r.fail("lambda must be positive");
    kernel.validate();
    AdditiveModel model{kernel, lambda, space.dag(), neighbors, std::move(X), Matrix(m, d),
                        Matrix(m, d)};
    for (Eigen::Index k = 0; k < d; ++k) {
      model.alpha1.col(k) = alpha.col(2 * k);
      model.alpha0.col(k) = alpha.col(2 * k + 1);
    }
    expect_end(r);
    return model;
  }

  Matrix labels = r.block(static_cast<std::size_t>(m), "label");
  OutputSpace space = read_space(r);
  expect_end(r);
  try {
    validate_labels(labels, space);
  } catch (const InputError& e) {
    throw InputError(name + ": " + e.what());
  }
  return fit(kernel, lambda, std::move(X), std::move(labels), std::move(space), intercept);
}

AnyModel load_model(const std::string& path) {
  auto in = open_in(path);
  return read_model(in, path);
}

}  // namespace ecrm
