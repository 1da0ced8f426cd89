#pragma once

#include "nlvar/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace nlvar {

/// %.17g — enough digits that parsing the text recovers the double exactly.
std::string format_double(double value);

/// Panel CSV: header "t,node_0,...,node_{N-1}", then one line per sample with
/// the integer time index and N full-precision values. The parser round-trips
/// the writer byte-identically.
void write_panel_csv(const TimeSeriesPanel& panel, std::ostream& out);
void write_panel_csv(const TimeSeriesPanel& panel, const std::filesystem::path& path);
TimeSeriesPanel read_panel_csv(std::istream& in, SeriesRole role = SeriesRole::observed);
TimeSeriesPanel read_panel_csv(const std::filesystem::path& path,
                               SeriesRole role = SeriesRole::observed);

/// A model file holds either a full nonlinear model or a bare coefficient
/// tensor with identity observation maps (the linear baseline).
struct StoredModel {
  std::optional<NlVarModel> nonlinear;
  std::optional<VarCoefficients> linear;

  bool is_linear() const { return linear.has_value(); }
  const VarCoefficients& coefficients() const;
};

void save_model(const NlVarModel& model, const std::filesystem::path& path);
void save_linear_model(const VarCoefficients& var, const std::filesystem::path& path);

/// Loads either kind; validates the format version, shape consistency and
/// (for nonlinear models) feasibility.
StoredModel load_model(const std::filesystem::path& path);

/// Flat key=value config file; '#' starts a comment, blank lines are skipped,
/// duplicate keys are rejected.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap read_config(const std::filesystem::path& path);

/// Typed access over a ConfigMap that tracks which keys were consumed, so a
/// command can reject unknown (typo'd) keys afterwards.
class ConfigView {
 public:
  explicit ConfigView(ConfigMap values) : values_(std::move(values)) {}

  long get_long(const std::string& key, long fallback);
  double get_double(const std::string& key, double fallback);
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback);
  std::string get_string(const std::string& key, const std::string& fallback);

  /// Throws ValidationError listing any keys never consumed by a getter.
  void reject_unknown_keys() const;

  /// Every effective value: consumed defaults plus file contents.
  const ConfigMap& effective() const { return effective_; }

 private:
  const std::string* find(const std::string& key);

  ConfigMap values_;
  ConfigMap effective_;
  std::map<std::string, bool> consumed_;
};

/// key=value lines, sorted by key.
void write_manifest(const ConfigMap& values, const std::filesystem::path& path);

}  // namespace nlvar
