#include "ecrm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ecrm/additive.hpp"
#include "ecrm/baselines.hpp"
#include "ecrm/flow_data.hpp"
#include "ecrm/inference.hpp"
#include "ecrm/io.hpp"
#include "ecrm/model.hpp"
#include "ecrm/risk.hpp"

namespace ecrm {

namespace {

struct SpaceOptions {
  std::string kind;
  std::string hierarchy;
  std::string network;
  std::string points;

  void add(CLI::App* app, bool required) {
    auto* opt = app->add_option("--space", kind, "Output space")
                    ->check(CLI::IsMember({"hierarchy", "assignment", "flow", "binary", "finite"}));
    if (required) opt->required();
    app->add_option("--hierarchy", hierarchy, "Hierarchy file (parent child per line)");
    app->add_option("--network", network, "Network file; defaults to the 6-node benchmark");
    app->add_option("--points", points, "Finite space: one output per line");
  }

  OutputSpace build(Eigen::Index label_cols) const {
    if (kind == "hierarchy") {
      if (hierarchy.empty()) throw InputError("--space hierarchy needs --hierarchy");
      return OutputSpace::hierarchy(load_hierarchy(hierarchy));
    }
    if (kind == "assignment") return OutputSpace::assignment(static_cast<int>(label_cols));
    if (kind == "flow")
      return OutputSpace::flow(network.empty() ? FlowNetwork::benchmark() : load_network(network));
    if (kind == "binary") return OutputSpace::binary_sign();
    if (kind == "finite") {
      if (points.empty()) throw InputError("--space finite needs --points");
      const Matrix P = load_matrix(points);
      std::vector<Vector> pts;
      for (Eigen::Index i = 0; i < P.rows(); ++i) pts.push_back(P.row(i).transpose());
      return OutputSpace::finite(std::move(pts));
    }
    throw InputError("unknown space '" + kind + "'");
  }
};

// Labels are read before the space exists (assignments take d from them).
Matrix load_labels_for(const std::string& path, const SpaceOptions& so) {
  if (so.kind == "binary") return load_sign_labels(path);
  if (so.kind == "assignment") return load_permutations(path);
  return load_matrix(path);
}

struct SolverOptions {
  SolverParams params;
  void add(CLI::App* app) {
    app->add_option("--max-iters", params.max_iters, "Subgradient iterations per restart");
    app->add_option("--restarts", params.restarts, "Restarts for nonconvex flow problems");
    app->add_option("--step-a", params.step_a, "Step size numerator a in a/(1+t*b)");
    app->add_option("--step-b", params.step_b, "Step size decay b in a/(1+t*b)");
    app->add_option("--gap-tol", params.gap_tol, "Frank-Wolfe gap tolerance");
    app->add_option("--seed", params.seed, "Seed for randomized restarts");
  }
};

struct KernelOptions {
  std::string kind = "rbf";
  double gamma = 1.0;
  double lambda = 0.0;
  void add(CLI::App* app) {
    app->add_option("--kernel", kind, "linear or rbf")->check(CLI::IsMember({"linear", "rbf"}));
    app->add_option("--gamma", gamma, "RBF bandwidth gamma in exp(-gamma |x-x'|^2)");
    app->add_option("--lambda", lambda, "Ridge regularization lambda")->required();
  }
  KernelSpec spec() const {
    KernelSpec k = parse_kernel_kind(kind) == KernelKind::rbf ? KernelSpec::rbf(gamma)
                                                              : KernelSpec::linear();
    k.validate();
    return k;
  }
};

LossSpec make_loss(const std::string& name, const OutputSpace& space) {
  if (name.empty()) return default_loss(space);
  const LossKind kind = parse_loss_kind(name);
  if (kind == LossKind::hierarchical) {
    if (space.kind() != SpaceKind::hierarchy)
      throw InputError("the hierarchical loss needs a hierarchy space");
    return LossSpec::hierarchical(space.dag());
  }
  return LossSpec{kind, {}, {}};
}

const OutputSpace& model_space(const AnyModel& model, std::optional<OutputSpace>& storage) {
  if (const auto* m = std::get_if<TrainedModel>(&model)) return m->space;
  storage = OutputSpace::hierarchy(std::get<AdditiveModel>(model).dag);
  return *storage;
}

InferenceResult predict_one(const AnyModel& model, const LossSpec& loss, const Vector& x,
                            const SolverParams& params) {
  if (const auto* m = std::get_if<TrainedModel>(&model)) return infer(*m, loss, x, params);
  const auto& am = std::get<AdditiveModel>(model);
  if (loss.kind != LossKind::hamming)
    throw InputError("additive models are fitted to the hamming decomposition; use --loss hamming");
  return infer_additive(am, x);
}

const TrainedModel& require_ecrm(const AnyModel& model, const std::string& what) {
  if (const auto* m = std::get_if<TrainedModel>(&model)) return *m;
  throw InputError(what + " needs a plain ECRM model, not an additive one");
}

void write_outputs(std::ostream& out, const std::vector<Vector>& ys) {
  for (const Vector& y : ys) {
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      if (j) out << ' ';
      out << format_double(y[j]);
    }
    out << '\n';
  }
}

void emit(const std::string& path, std::ostream& out, const std::vector<Vector>& ys) {
  if (path.empty()) {
    write_outputs(out, ys);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  write_outputs(f, ys);
}

// Random tree on d nodes (node 0 the root) with m feasible label vectors.
struct BenchData {
  HierarchyDag dag;
  std::shared_ptr<const Matrix> labels;
};

BenchData bench_tree(int d, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(d));
  std::vector<int> parent(d, -1);
  for (int j = 1; j < d; ++j) parent[j] = std::uniform_int_distribution<int>(0, j - 1)(rng);
  auto dag = HierarchyDag::from_parents(parent);
  auto Y = std::make_shared<Matrix>(Matrix::Zero(m, d));
  std::bernoulli_distribution coin(0.7);
  for (int i = 0; i < m; ++i) {
    (*Y)(i, 0) = 1.0;
    for (int j = 1; j < d; ++j) (*Y)(i, j) = ((*Y)(i, parent[j]) != 0.0 && coin(rng)) ? 1.0 : 0.0;
  }
  return {std::move(dag), std::move(Y)};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimated conditional risk minimization for structured outputs", "ecrm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // train
  auto* train = app.add_subcommand("train", "Fit a model and write it to a model file");
  std::string x_path, labels_path, out_path, variant = "ecrm", intercept = "none",
                                             neighborhood = "adjacent";
  SpaceOptions space_opts;
  KernelOptions kernel_opts;
  train->add_option("--x", x_path, "Training features")->required();
  train->add_option("--labels", labels_path, "Training labels")->required();
  space_opts.add(train, true);
  kernel_opts.add(train);
  train->add_option("--intercept", intercept, "none or centered")
      ->check(CLI::IsMember({"none", "centered"}));
  train->add_option("--variant", variant, "ecrm or additive (hierarchies only)")
      ->check(CLI::IsMember({"ecrm", "additive"}));
  train->add_option("--neighborhood", neighborhood, "Additive model: adjacent or self")
      ->check(CLI::IsMember({"adjacent", "self"}));
  train->add_option("--out", out_path, "Model file to write")->required();

  // predict / eval / surrogate / bound share a model and a loss
  std::string model_path, loss_name;
  SolverOptions solver_opts;
  auto* predict = app.add_subcommand("predict", "Predict one output per row of --x");
  predict->add_option("--model", model_path, "Model file")->required();
  predict->add_option("--x", x_path, "Features")->required();
  predict->add_option("--loss", loss_name, "Loss to minimize (default depends on the space)");
  predict->add_option("--out", out_path, "Output file (default stdout)");
  solver_opts.add(predict);

  auto* eval = app.add_subcommand("eval", "Mean loss of the predictions");
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("--x", x_path, "Features")->required();
  eval->add_option("--labels", labels_path, "True labels")->required();
  eval->add_option("--loss", loss_name, "Loss to minimize and report");
  solver_opts.add(eval);

  double rho = 1.0, delta_conf = 0.05;
  std::optional<double> loss_bound_opt, kappa_opt;
  auto* surrogate = app.add_subcommand("surrogate", "Per-sample surrogate loss and its mean");
  surrogate->add_option("--model", model_path, "Model file")->required();
  surrogate->add_option("--x", x_path, "Features")->required();
  surrogate->add_option("--labels", labels_path, "True labels")->required();
  surrogate->add_option("--loss", loss_name, "Loss");
  surrogate->add_option("--rho", rho, "Margin rho > 0")->required();
  surrogate->add_option("--bound", loss_bound_opt, "Loss cap L (default: sup of the loss)");
  solver_opts.add(surrogate);

  auto* bound = app.add_subcommand("bound", "Generalization bound terms");
  bound->add_option("--model", model_path, "Model file")->required();
  bound->add_option("--x", x_path, "Features")->required();
  bound->add_option("--labels", labels_path, "True labels")->required();
  bound->add_option("--loss", loss_name, "Loss");
  bound->add_option("--rho", rho, "Margin rho > 0")->required();
  bound->add_option("--delta", delta_conf, "Confidence delta in (0,1)")->required();
  bound->add_option("--bound", loss_bound_opt, "Loss cap L (default: sup of the loss)");
  bound->add_option("--kappa", kappa_opt, "sup k(x,x) (default: from the kernel and inputs)");
  solver_opts.add(bound);

  // simulate-flow
  int m = 100, input_dim = 20;
  double tau = 1.0;
  std::optional<double> tau_share;
  std::uint64_t seed = 0, theta_seed = 0;
  std::string y_out, network_path;
  auto* simulate = app.add_subcommand("simulate-flow", "Sample a synthetic flow dataset");
  simulate->add_option("--m", m, "Number of samples")->required();
  simulate->add_option("--seed", seed, "Sample seed");
  simulate->add_option("--theta-seed", theta_seed, "Seed for the path utility coefficients");
  simulate->add_option("--tau", tau, "Gumbel noise scale");
  simulate->add_option("--tau-share", tau_share, "Softmax temperature, 0 for argmax (default tau)");
  simulate->add_option("--p", input_dim, "Input dimension");
  simulate->add_option("--network", network_path, "Network file (default benchmark)");
  simulate->add_option("--x-out", x_path, "Feature file to write")->required();
  simulate->add_option("--y-out", y_out, "Flow file to write")->required();

  // bench
  std::vector<int> bench_d{10, 100, 1000};
  int bench_reps = 5;
  auto* bench = app.add_subcommand("bench", "Training time versus number of labels (CSV)");
  bench->add_option("--m", m, "Training set size")->default_val(500);
  bench->add_option("--d", bench_d, "Hierarchy sizes")->delimiter(',');
  bench->add_option("--reps", bench_reps, "Repetitions per size (median reported)");
  bench->add_option("--p", input_dim, "Input dimension");
  bench->add_option("--seed", seed, "Data seed");
  bench->add_option("--gamma", kernel_opts.gamma, "RBF bandwidth");

  // tu-check
  std::string matrix_path;
  double tu_cap = 2e6;
  auto* tu = app.add_subcommand("tu-check", "Total unimodularity of an integer matrix file");
  tu->add_option("--matrix", matrix_path, "Matrix file")->required();
  tu->add_option("--cap", tu_cap, "Maximum number of square submatrices to check");

  // baseline
  std::string method, x_test_path;
  int knn_k = 5;
  SpaceOptions base_space;
  KernelOptions base_kernel;
  auto* baseline = app.add_subcommand("baseline", "kNN local risk or KRR + projection");
  baseline->add_option("--method", method, "knn or krr-project")
      ->required()
      ->check(CLI::IsMember({"knn", "krr-project"}));
  baseline->add_option("--x", x_path, "Training features")->required();
  baseline->add_option("--labels", labels_path, "Training labels")->required();
  baseline->add_option("--x-test", x_test_path, "Test features")->required();
  baseline->add_option("--k", knn_k, "Neighbours for knn");
  baseline->add_option("--loss", loss_name, "Loss for knn");
  baseline->add_option("--out", out_path, "Output file (default stdout)");
  base_space.add(baseline, true);
  base_kernel.kind = "rbf";
  baseline->add_option("--kernel", base_kernel.kind, "linear or rbf")
      ->check(CLI::IsMember({"linear", "rbf"}));
  baseline->add_option("--gamma", base_kernel.gamma, "RBF bandwidth");
  baseline->add_option("--lambda", base_kernel.lambda, "Ridge lambda for krr-project");
  solver_opts.add(baseline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) {
      const Matrix X = load_features(x_path);
      Matrix Y = load_labels_for(labels_path, space_opts);
      OutputSpace space = space_opts.build(Y.cols());
      validate_labels(Y, space);
      const KernelSpec k = kernel_opts.spec();
      if (variant == "additive") {
        if (space.kind() != SpaceKind::hierarchy)
          throw InputError("the additive variant needs --space hierarchy");
        if (intercept != "none") throw InputError("the additive variant has no intercept option");
        save_model(out_path, fit_additive(X, Y, space.dag(), k, kernel_opts.lambda,
                                          neighborhood == "adjacent"));
      } else {
        save_model(out_path, fit(k, kernel_opts.lambda, X, std::move(Y), std::move(space),
                                 parse_intercept_mode(intercept)));
      }
      return 0;
    }

    if (*predict || *eval || *surrogate || *bound) {
      const AnyModel model = load_model(model_path);
      std::optional<OutputSpace> storage;
      const OutputSpace& space = model_space(model, storage);
      const LossSpec loss = make_loss(loss_name, space);
      const Matrix X = load_features(x_path);
      solver_opts.params.validate();

      if (*predict) {
        std::vector<Vector> ys;
        for (Eigen::Index i = 0; i < X.rows(); ++i)
          ys.push_back(predict_one(model, loss, X.row(i).transpose(), solver_opts.params).y);
        emit(out_path, out, ys);
        return 0;
      }

      const Matrix Y = load_labels(labels_path, space);
      if (Y.rows() != X.rows())
        throw InputError("got " + std::to_string(X.rows()) + " feature rows but " +
                         std::to_string(Y.rows()) + " label rows");

      if (*eval) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
          const Vector yhat = predict_one(model, loss, X.row(i).transpose(), solver_opts.params).y;
          total += loss(yhat, Y.row(i).transpose());
        }
        out << "mean_loss " << format_double(total / static_cast<double>(X.rows())) << '\n';
        return 0;
      }

      const TrainedModel& tm = require_ecrm(model, *surrogate ? "surrogate" : "bound");
      SurrogateConfig cfg{rho, loss_bound_opt ? *loss_bound_opt : loss_bound(loss, space)};
      cfg.validate();
      if (*surrogate) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
          const auto v = surrogate_loss(tm, loss, cfg, X.row(i).transpose(), Y.row(i).transpose(),
                                        solver_opts.params);
          total += v.value;
          out << i << ' ' << format_double(v.value) << ' ' << to_string(v.certificate) << '\n';
        }
        out << "mean " << format_double(total / static_cast<double>(X.rows())) << '\n';
        return 0;
      }
      BoundInputs b;
      b.empirical_risk = empirical_surrogate_risk(tm, loss, cfg, X, Y, solver_opts.params);
      b.loss_bound = cfg.bound;
      b.kappa = kappa_opt ? *kappa_opt
                          : std::max(kernel_diagonal_bound(tm.ridge.kernel(), tm.ridge.inputs()),
                                     kernel_diagonal_bound(tm.ridge.kernel(), X));
      b.lambda = tm.ridge.lambda();
      b.rho = rho;
      b.delta = delta_conf;
      b.m = static_cast<double>(tm.size());
      const BoundTerms t = generalization_bound_terms(b);
      out << "empirical_surrogate_risk " << format_double(t.empirical) << '\n';
      out << "complexity_term " << format_double(t.complexity) << '\n';
      out << "confidence_term " << format_double(t.confidence) << '\n';
      out << "total " << format_double(t.total) << '\n';
      return 0;
    }

    if (*simulate) {
      FlowNetwork net = network_path.empty() ? FlowNetwork::benchmark() : load_network(network_path);
      const auto spec = make_flow_generator(std::move(net), input_dim, tau, theta_seed, tau_share);
      const auto data = simulate_flow_data(spec, m, seed);
      save_matrix(x_path, data.X);
      save_matrix(y_out, data.Y);
      return 0;
    }

    if (*bench) {
      if (m < 1 || bench_reps < 1 || input_dim < 1)
        throw InputError("bench needs positive --m, --reps and --p");
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      Matrix X(m, input_dim);
      for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = unif(rng);
      const KernelSpec k = KernelSpec::rbf(kernel_opts.gamma);
      std::vector<BenchData> data;
      std::vector<OutputSpace> spaces;
      for (int d : bench_d) {
        if (d < 1) throw InputError("hierarchy sizes must be positive");
        data.push_back(bench_tree(d, m, seed));
        spaces.push_back(OutputSpace::hierarchy(data.back().dag));
      }
      // One warm-up fit, then repetitions interleaved across sizes so that
      // load changes affect every size alike.
      fit(k, 1e-3, X, data.front().labels, spaces.front());
      std::vector<std::vector<double>> secs(data.size());
      for (int r = 0; r < bench_reps; ++r)
        for (std::size_t s = 0; s < data.size(); ++s) {
          const auto t0 = std::chrono::steady_clock::now();
          const TrainedModel model = fit(k, 1e-3, X, data[s].labels, spaces[s]);
          const auto t1 = std::chrono::steady_clock::now();
          secs[s].push_back(std::chrono::duration<double>(t1 - t0).count());
        }
      out << "d,train_seconds\n";
      for (std::size_t s = 0; s < data.size(); ++s) {
        std::sort(secs[s].begin(), secs[s].end());
        out << bench_d[s] << ',' << format_double(secs[s][secs[s].size() / 2]) << '\n';
      }
      return 0;
    }

    if (*tu) {
      const Matrix M = load_matrix(matrix_path);
      IntMatrix A(M.rows(), M.cols());
      for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
          const double v = M(i, j);
          if (v != std::round(v) || std::abs(v) > 1e15)
            throw InputError(matrix_path + ":" + std::to_string(i + 1) + ": entry " +
                             format_double(v) + " is not an integer");
          A(i, j) = static_cast<long long>(v);
        }
      if (!(tu_cap >= 1)) throw InputError("--cap must be at least 1");
      out << to_string(is_totally_unimodular(A, static_cast<std::size_t>(tu_cap))) << '\n';
      return 0;
    }

    if (*baseline) {
      const Matrix X = load_features(x_path);
      Matrix Y = load_labels_for(labels_path, base_space);
      const OutputSpace space = base_space.build(Y.cols());
      validate_labels(Y, space);
      const Matrix Xt = load_features(x_test_path);
      if (Xt.cols() != X.cols()) throw InputError("test features have the wrong dimension");
      std::vector<Vector> ys;
      if (method == "knn") {
        const LossSpec loss = make_loss(loss_name, space);
        for (Eigen::Index i = 0; i < Xt.rows(); ++i)
          ys.push_back(knn_local_risk_predict(X, Y, loss, space, Xt.row(i).transpose(), knn_k,
                                              solver_opts.params)
                           .y);
      } else {
        if (!(base_kernel.lambda > 0.0)) throw InputError("krr-project needs --lambda > 0");
        const KrrProjector proj(base_kernel.spec(), base_kernel.lambda, X, std::move(Y), space);
        for (Eigen::Index i = 0; i < Xt.rows(); ++i)
          ys.push_back(proj.predict(Xt.row(i).transpose()).y);
      }
      emit(out_path, out, ys);
      return 0;
    }
  } catch (const NumericalError& e) {
    err << "ecrm: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    err << "ecrm: " << e.what() << '\n';
    return 2;
  } catch (const std::bad_alloc&) {
    err << "ecrm: out of memory\n";
    return 3;
  }
  return 2;
}

}  // namespace ecrm
