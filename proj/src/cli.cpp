#include "nlvar/cli.hpp"

#include "nlvar/baseline_linear.hpp"
#include "nlvar/forward_model.hpp"
#include "nlvar/gradients.hpp"
#include "nlvar/rng.hpp"
#include "nlvar/synthetic.hpp"
#include "nlvar/topology.hpp"
#include "nlvar/training.hpp"
#include "nlvar/var_dynamics.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace nlvar {

namespace {

constexpr double kGradCheckThreshold = 1e-5;

ModelShape read_shape(ConfigView& config, int n_nodes_from_data) {
  ModelShape shape;
  shape.n_nodes = n_nodes_from_data;
  shape.order = static_cast<int>(config.get_long("order", 2));
  shape.n_units = static_cast<int>(config.get_long("units", 5));
  validate(shape);
  return shape;
}

TrainConfig read_train_config(ConfigView& config) {
  TrainConfig train;
  train.epochs = static_cast<int>(config.get_long("epochs", train.epochs));
  train.batch_size = static_cast<int>(config.get_long("batch_size", train.batch_size));
  train.learning_rate = config.get_double("learning_rate", train.learning_rate);
  const std::string optimizer = config.get_string("optimizer", "adam");
  if (optimizer == "adam") {
    train.optimizer = Optimizer::adam;
  } else if (optimizer == "sgd") {
    train.optimizer = Optimizer::sgd;
  } else {
    throw ValidationError("config key 'optimizer': must be 'sgd' or 'adam', got '" + optimizer + "'");
  }
  train.adam_beta1 = config.get_double("adam_beta1", train.adam_beta1);
  train.adam_beta2 = config.get_double("adam_beta2", train.adam_beta2);
  train.adam_epsilon = config.get_double("adam_epsilon", train.adam_epsilon);
  train.l1_weight = config.get_double("l1_weight", train.l1_weight);
  train.l2_weight = config.get_double("l2_weight", train.l2_weight);
  train.test_fraction = config.get_double("test_fraction", train.test_fraction);
  train.seed = config.get_seed("seed", train.seed);
  train.w_floor = config.get_double("w_floor", train.w_floor);
  train.margin_fraction = config.get_double("margin_fraction", train.margin_fraction);
  validate(train);
  return train;
}

}  // namespace

void cmd_generate(const std::filesystem::path& config_path, const std::string& out_prefix) {
  ConfigView config(read_config(config_path));
  ModelShape shape;
  shape.n_nodes = static_cast<int>(config.get_long("nodes", 10));
  shape.order = static_cast<int>(config.get_long("order", 2));
  shape.n_units = static_cast<int>(config.get_long("units", 5));
  validate(shape);
  const long t_total = config.get_long("t_total", 1000);
  const long burn_in = config.get_long("burn_in", kDefaultBurnIn);
  const double target_radius = config.get_double("target_radius", kDefaultTargetRadius);
  const double noise_std = config.get_double("noise_std", kDefaultNoiseStd);
  const double range_lower = config.get_double("range_lower", -1.0);
  const double range_upper = config.get_double("range_upper", 1.0);
  const std::uint64_t seed = config.get_seed("seed", 1);
  config.reject_unknown_keys();

  const std::vector<RangeBounds> ranges(static_cast<std::size_t>(shape.n_nodes),
                                        RangeBounds{range_lower, range_upper});
  for (std::size_t i = 0; i < ranges.size(); ++i) validate(ranges[i], static_cast<int>(i));

  const SyntheticDataset dataset =
      generate_dataset(shape, target_radius, noise_std, ranges, t_total, seed, burn_in);

  const std::string observed_path = out_prefix + "_observed.csv";
  const std::string latent_path = out_prefix + "_latent.csv";
  const std::string model_path = out_prefix + "_truth.model";
  write_panel_csv(dataset.observed, observed_path);
  write_panel_csv(dataset.latent, latent_path);
  save_model(dataset.ground_truth, model_path);

  ConfigMap manifest = config.effective();
  manifest["observed_csv"] = observed_path;
  manifest["latent_csv"] = latent_path;
  manifest["truth_model"] = model_path;
  write_manifest(manifest, out_prefix + "_manifest.txt");
}

void cmd_fit(const std::filesystem::path& data_csv, const std::filesystem::path& config_path,
             const std::filesystem::path& model_out, const std::filesystem::path& report_out) {
  const TimeSeriesPanel data = read_panel_csv(data_csv);
  ConfigView config(read_config(config_path));
  const ModelShape shape = read_shape(config, data.n_nodes());
  const TrainConfig train = read_train_config(config);
  config.reject_unknown_keys();

  const FitResult result = fit(data, shape, train);

  try {
    save_model(result.model, model_out);
    std::ofstream report(report_out);
    if (!report) throw ValidationError("cannot open file for writing: " + report_out.string());
    report << "epoch,train_mse,test_mse\n";
    for (int e = 0; e < result.report.epochs; ++e) {
      report << e << ',' << format_double(result.report.train_mse[static_cast<std::size_t>(e)])
             << ',' << format_double(result.report.test_mse[static_cast<std::size_t>(e)]) << '\n';
    }
    if (!report) throw ValidationError("failed while writing " + report_out.string());
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(model_out, ec);
    std::filesystem::remove(report_out, ec);
    throw;
  }
}

void cmd_fit_linear(const std::filesystem::path& data_csv, int order, double ridge,
                    const std::filesystem::path& model_out) {
  const TimeSeriesPanel data = read_panel_csv(data_csv);
  const VarCoefficients var = fit_ols(data, order, ridge);
  save_linear_model(var, model_out);
}

EvalOutput cmd_eval(const std::filesystem::path& model_file,
                    const std::filesystem::path& data_csv, std::ostream& out) {
  const StoredModel stored = load_model(model_file);
  const TimeSeriesPanel data = read_panel_csv(data_csv);

  EvalOutput result;
  if (stored.is_linear()) {
    result.mse = evaluate_linear(*stored.linear, data);
    result.node_mse = evaluate_linear_per_node(*stored.linear, data);
  } else {
    result.mse = evaluate_mse(*stored.nonlinear, data);
    result.node_mse = evaluate_node_mse(*stored.nonlinear, data);
  }
  out << "mse " << format_double(result.mse) << '\n';
  for (int i = 0; i < result.node_mse.size(); ++i) {
    out << "node_mse " << i << ' ' << format_double(result.node_mse[i]) << '\n';
  }
  return result;
}

void cmd_topology(const std::filesystem::path& model_file, double threshold,
                  const std::filesystem::path& edges_out) {
  const StoredModel stored = load_model(model_file);
  const EdgeList edges = extract_topology(stored.coefficients(), threshold);
  std::ofstream out(edges_out);
  if (!out) throw ValidationError("cannot open file for writing: " + edges_out.string());
  write_edge_list(edges, out);
  if (!out) throw ValidationError("failed while writing " + edges_out.string());
}

int cmd_gradcheck(std::uint64_t seed, int instances, bool corrupt, std::ostream& out) {
  if (instances < 1) throw ValidationError("gradcheck: instances must be >= 1");
  RandomStream rng(seed);
  GradCheckReport worst;
  for (int k = 0; k < instances; ++k) {
    ModelShape shape;
    shape.n_nodes = 2 + static_cast<int>(rng.below(3));  // 2..4
    shape.order = 1 + static_cast<int>(rng.below(3));    // 1..3
    shape.n_units = 2 + static_cast<int>(rng.below(4));  // 2..5
    const std::uint64_t instance_seed = seed * 1000003ULL + static_cast<std::uint64_t>(k);
    const GradCheckInstance inst = make_gradcheck_instance(instance_seed, shape);

    const ForwardResult base = forward_trace(inst.model, inst.window, inst.target, 1e-15);
    ModelGradient analytic = grad_timestep(inst.model, inst.window, inst.target, base.trace);
    if (corrupt && k == 0) analytic.var[0](0, 0) += 1e-3;
    const ModelGradient numeric = fd_gradient(inst.model, inst.window, inst.target, 1e-6);
    const GradCheckReport report = compare_gradients(analytic, numeric);

    worst.max_rel_var = std::max(worst.max_rel_var, report.max_rel_var);
    worst.max_rel_alpha = std::max(worst.max_rel_alpha, report.max_rel_alpha);
    worst.max_rel_weight = std::max(worst.max_rel_weight, report.max_rel_weight);
    worst.max_rel_shift = std::max(worst.max_rel_shift, report.max_rel_shift);
    worst.max_rel_bias = std::max(worst.max_rel_bias, report.max_rel_bias);
  }

  out << "instances " << instances << '\n';
  out << "max_rel var " << format_double(worst.max_rel_var) << '\n';
  out << "max_rel alpha " << format_double(worst.max_rel_alpha) << '\n';
  out << "max_rel weight " << format_double(worst.max_rel_weight) << '\n';
  out << "max_rel shift " << format_double(worst.max_rel_shift) << '\n';
  out << "max_rel bias " << format_double(worst.max_rel_bias) << '\n';
  const bool pass = worst.max_rel() < kGradCheckThreshold;
  out << "result " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? 0 : 2;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Nonlinear VAR identification: latent linear dynamics behind per-node monotone observation maps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_prefix;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset from a config file");
  generate->add_option("config", config_path, "key=value config file")->required();
  generate->add_option("out-prefix", out_prefix, "prefix for the output files")->required();

  std::string fit_data;
  std::string fit_config;
  std::string fit_model_out;
  std::string fit_report_out;
  auto* fit_cmd = app.add_subcommand("fit", "Train the nonlinear model on a data CSV");
  fit_cmd->add_option("data", fit_data, "observed panel CSV")->required();
  fit_cmd->add_option("config", fit_config, "key=value config file")->required();
  fit_cmd->add_option("model-out", fit_model_out, "output model file")->required();
  fit_cmd->add_option("report-out", fit_report_out, "output epoch,train_mse,test_mse CSV")->required();

  std::string lin_data;
  std::string lin_model_out;
  int lin_order = 2;
  double lin_ridge = kDefaultRidge;
  auto* fit_linear = app.add_subcommand("fit-linear", "Closed-form linear VAR baseline fit");
  fit_linear->add_option("data", lin_data, "observed panel CSV")->required();
  fit_linear->add_option("model-out", lin_model_out, "output model file")->required();
  fit_linear->add_option("--order", lin_order, "VAR order P")->capture_default_str();
  fit_linear->add_option("--ridge", lin_ridge, "ridge added to the normal equations")
      ->capture_default_str();

  std::string eval_model;
  std::string eval_data;
  auto* eval_cmd = app.add_subcommand("eval", "Teacher-forced MSE of a stored model on a data CSV");
  eval_cmd->add_option("model", eval_model, "model file")->required();
  eval_cmd->add_option("data", eval_data, "observed panel CSV")->required();

  std::string topo_model;
  std::string topo_out;
  double topo_threshold = kDefaultEdgeThreshold;
  auto* topo_cmd = app.add_subcommand(
      "topology",
      "Write the directed edge list read off the VAR coefficient support. The latent space is "
      "identified only up to per-node reparameterization, so compare edge strengths with caution; "
      "the zero pattern is the meaningful output.");
  topo_cmd->add_option("model", topo_model, "model file")->required();
  topo_cmd->add_option("edges-out", topo_out, "output edge CSV")->required();
  topo_cmd->add_option("--threshold", topo_threshold, "minimum max-over-lags |coefficient|")
      ->capture_default_str();

  std::uint64_t gc_seed = 7;
  int gc_instances = 20;
  bool gc_corrupt = false;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the analytic gradients");
  gradcheck->add_option("--seed", gc_seed, "base seed for the random instances")->capture_default_str();
  gradcheck->add_option("--instances", gc_instances, "number of random instances")
      ->capture_default_str();
  gradcheck->add_flag("--corrupt", gc_corrupt, "inject an error into one analytic component")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate) {
      cmd_generate(config_path, out_prefix);
    } else if (*fit_cmd) {
      cmd_fit(fit_data, fit_config, fit_model_out, fit_report_out);
    } else if (*fit_linear) {
      cmd_fit_linear(lin_data, lin_order, lin_ridge, lin_model_out);
    } else if (*eval_cmd) {
      cmd_eval(eval_model, eval_data, std::cout);
    } else if (*topo_cmd) {
      cmd_topology(topo_model, topo_threshold, topo_out);
    } else if (*gradcheck) {
      return cmd_gradcheck(gc_seed, gc_instances, gc_corrupt, std::cout);
    }
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  } catch (const NumericalError& err) {
    std::cerr << "numerical error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace nlvar
