#pragma once

#include "nlvar/io.hpp"
#include "nlvar/types.hpp"

#include <filesystem>
#include <iosfwd>

namespace nlvar {

/// Generates a synthetic dataset from a config file. Writes
/// <prefix>_observed.csv, <prefix>_latent.csv, <prefix>_truth.model and
/// <prefix>_manifest.txt (all effective parameters and derived seeds).
void cmd_generate(const std::filesystem::path& config_path, const std::string& out_prefix);

/// Trains the nonlinear model on a data CSV; writes the model file and a
/// report CSV with columns epoch,train_mse,test_mse.
void cmd_fit(const std::filesystem::path& data_csv, const std::filesystem::path& config_path,
             const std::filesystem::path& model_out, const std::filesystem::path& report_out);

/// Closed-form linear VAR baseline fit.
void cmd_fit_linear(const std::filesystem::path& data_csv, int order, double ridge,
                    const std::filesystem::path& model_out);

/// Prints teacher-forced MSE and per-node MSE for either model kind.
struct EvalOutput {
  double mse = 0.0;
  Eigen::VectorXd node_mse;
};
EvalOutput cmd_eval(const std::filesystem::path& model_file,
                    const std::filesystem::path& data_csv, std::ostream& out);

/// Writes the thresholded edge list of a stored model.
void cmd_topology(const std::filesystem::path& model_file, double threshold,
                  const std::filesystem::path& edges_out);

/// Runs the gradient oracle sweep; prints the worst relative error per
/// parameter block and returns nonzero if any block exceeds 1e-5.
/// `corrupt` injects an offset into one analytic component (test hook).
int cmd_gradcheck(std::uint64_t seed, int instances, bool corrupt, std::ostream& out);

/// Argument parsing and dispatch. Exit codes: 0 success, 1 validation error,
/// 2 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace nlvar
