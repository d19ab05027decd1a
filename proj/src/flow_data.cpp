#include "ecrm/flow_data.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ecrm/flow_solvers.hpp"

namespace ecrm {

namespace {

enum Stream : std::uint32_t { theta_stream = 1, sample_stream = 2, conditional_stream = 3 };

std::mt19937_64 counter_rng(std::uint64_t seed, std::uint64_t index, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double gumbel(std::mt19937_64& rng) { return -std::log(-std::log(open_uniform(rng))); }

Matrix path_matrix(const FlowNetwork& net) {
  const auto paths = enumerate_paths(net, 100000);
  Matrix P(static_cast<Eigen::Index>(paths.size()), net.arc_count());
  for (std::size_t k = 0; k < paths.size(); ++k) P.row(static_cast<Eigen::Index>(k)) = paths[k];
  return P;
}

Vector draw_flow(const FlowGeneratorSpec& spec, const Matrix& P, const Vector& x,
                 std::mt19937_64& rng) {
  const Eigen::Index K = P.rows();
  Vector z(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double u = spec.theta.row(k).dot(x) + spec.tau * gumbel(rng);
    z[k] = spec.tau_share > 0.0 ? u / spec.tau_share : u;
  }
  if (spec.tau_share == 0.0) {
    Eigen::Index best = 0;
    z.maxCoeff(&best);
    return P.row(best).transpose();
  }
  const double top = z.maxCoeff();
  Vector share = (z.array() - top).exp();
  share /= share.sum();
  return P.transpose() * share;
}

}  // namespace

void FlowGeneratorSpec::validate() const {
  if (!network.is_acyclic() || !network.has_unit_terminals())
    throw InputError("flow generator needs an acyclic network with a unit source and sink");
  if (input_dim < 1) throw InputError("input dimension must be positive");
  if (theta.cols() != input_dim) throw InputError("theta has the wrong number of columns");
  if (!theta.allFinite()) throw InputError("theta must be finite");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("tau must be >= 0");
  if (!(tau_share >= 0.0) || !std::isfinite(tau_share))
    throw InputError("share temperature must be >= 0");
}

FlowGeneratorSpec make_flow_generator(FlowNetwork network, int input_dim, double tau,
                                      std::uint64_t theta_seed, std::optional<double> tau_share) {
  if (!network.is_acyclic() || !network.has_unit_terminals())
    throw InputError("flow generator needs an acyclic network with a unit source and sink");
  if (input_dim < 1) throw InputError("input dimension must be positive");
  const int K = static_cast<int>(enumerate_paths(network, 100000).size());
  FlowGeneratorSpec spec{std::move(network), input_dim, Matrix(K, input_dim), tau,
                         tau_share.value_or(tau)};
  auto rng = counter_rng(theta_seed, 0, theta_stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < input_dim; ++j) spec.theta(k, j) = normal(rng);
  spec.validate();
  return spec;
}

FlowDataset simulate_flow_data(const FlowGeneratorSpec& spec, int m, std::uint64_t seed) {
  spec.validate();
  if (m < 1) throw InputError("need at least one sample");
  const Matrix P = path_matrix(spec.network);
  if (P.rows() != spec.path_count())
    throw InputError("theta has " + std::to_string(spec.path_count()) + " rows for " +
                     std::to_string(P.rows()) + " paths");
  FlowDataset data{Matrix(m, spec.input_dim), Matrix(m, spec.network.arc_count())};
  for (int i = 0; i < m; ++i) {
    auto rng = counter_rng(seed, static_cast<std::uint64_t>(i), sample_stream);
    Vector x(spec.input_dim);
    for (int j = 0; j < spec.input_dim; ++j) x[j] = open_uniform(rng);
    data.X.row(i) = x.transpose();
    data.Y.row(i) = draw_flow(spec, P, x, rng).transpose();
  }
  return data;
}

Matrix sample_flows(const FlowGeneratorSpec& spec, const Vector& x, int n, std::uint64_t seed) {
  spec.validate();
  if (x.size() != spec.input_dim) throw InputError("query has the wrong dimension");
  if (n < 1) throw InputError("need at least one draw");
  const Matrix P = path_matrix(spec.network);
  Matrix Y(n, spec.network.arc_count());
  for (int i = 0; i < n; ++i) {
    auto rng = counter_rng(seed, static_cast<std::uint64_t>(i), conditional_stream);
    Y.row(i) = draw_flow(spec, P, x, rng).transpose();
  }
  return Y;
}

}  // namespace ecrm
