#include "nlvar/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace nlvar {

namespace {

constexpr int kModelFormatVersion = 1;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file for reading: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open file for writing: " + path.string());
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError(where + ": cannot parse number '" + text + "'");
  }
  return value;
}

long parse_long(const std::string& text, const std::string& where) {
  long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError(where + ": cannot parse integer '" + text + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

// Token reader for the model file: whitespace-separated words with context in
// error messages.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string word(const std::string& expectation) {
    std::string token;
    if (!(in_ >> token)) {
      throw ValidationError("model file: unexpected end of file, expected " + expectation);
    }
    return token;
  }

  void keyword(const std::string& expected) {
    const std::string token = word("'" + expected + "'");
    if (token != expected) {
      throw ValidationError("model file: expected '" + expected + "', found '" + token + "'");
    }
  }

  double number(const std::string& context) { return parse_double(word(context), context); }

  long integer(const std::string& context) { return parse_long(word(context), context); }

 private:
  std::istream& in_;
};

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_panel_csv(const TimeSeriesPanel& panel, std::ostream& out) {
  out << 't';
  for (int i = 0; i < panel.n_nodes(); ++i) out << ",node_" << i;
  out << '\n';
  for (long t = 0; t < panel.length(); ++t) {
    out << t;
    for (int i = 0; i < panel.n_nodes(); ++i) out << ',' << format_double(panel.data(t, i));
    out << '\n';
  }
}

void write_panel_csv(const TimeSeriesPanel& panel, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_panel_csv(panel, out);
  if (!out) throw ValidationError("failed while writing " + path.string());
}

TimeSeriesPanel read_panel_csv(std::istream& in, SeriesRole role) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("panel CSV: empty file");
  const auto header = split(trim(line), ',');
  if (header.size() < 2 || header[0] != "t") {
    throw ValidationError("panel CSV: header must be 't,node_0,...'");
  }
  const int n = static_cast<int>(header.size()) - 1;
  for (int i = 0; i < n; ++i) {
    if (header[static_cast<std::size_t>(i) + 1] != "node_" + std::to_string(i)) {
      throw ValidationError("panel CSV: header column " + std::to_string(i + 1) +
                            " must be node_" + std::to_string(i));
    }
  }

  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cleaned = trim(line);
    if (cleaned.empty()) continue;
    const auto fields = split(cleaned, ',');
    const std::string where = "panel CSV line " + std::to_string(line_no);
    if (static_cast<int>(fields.size()) != n + 1) {
      throw ValidationError(where + ": expected " + std::to_string(n + 1) + " fields, found " +
                            std::to_string(fields.size()));
    }
    const long t = parse_long(fields[0], where);
    if (t != static_cast<long>(rows.size())) {
      throw ValidationError(where + ": time index " + std::to_string(t) + " out of order");
    }
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      row[static_cast<std::size_t>(i)] = parse_double(fields[static_cast<std::size_t>(i) + 1], where);
      if (!std::isfinite(row[static_cast<std::size_t>(i)])) {
        throw ValidationError(where + ": non-finite value in node_" + std::to_string(i));
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("panel CSV: no data rows");

  TimeSeriesPanel panel;
  panel.role = role;
  panel.data.resize(static_cast<long>(rows.size()), n);
  for (long t = 0; t < panel.data.rows(); ++t) {
    for (int i = 0; i < n; ++i) panel.data(t, i) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
  }
  return panel;
}

TimeSeriesPanel read_panel_csv(const std::filesystem::path& path, SeriesRole role) {
  auto in = open_input(path);
  return read_panel_csv(in, role);
}

const VarCoefficients& StoredModel::coefficients() const {
  if (linear) return *linear;
  if (nonlinear) return nonlinear->var;
  throw ValidationError("stored model is empty");
}

namespace {

void write_var_block(std::ostream& out, const VarCoefficients& var) {
  for (int q = 0; q < var.order(); ++q) {
    out << "var_lag " << q << '\n';
    const auto& lag = var.lags[static_cast<std::size_t>(q)];
    for (int i = 0; i < lag.rows(); ++i) {
      for (int j = 0; j < lag.cols(); ++j) {
        if (j > 0) out << ' ';
        out << format_double(lag(i, j));
      }
      out << '\n';
    }
  }
}

VarCoefficients read_var_block(TokenReader& reader, int order, int n_nodes) {
  VarCoefficients var = VarCoefficients::zero(order, n_nodes);
  for (int q = 0; q < order; ++q) {
    reader.keyword("var_lag");
    const long index = reader.integer("var_lag index");
    if (index != q) {
      throw ValidationError("model file: var_lag blocks out of order (found " +
                            std::to_string(index) + ", expected " + std::to_string(q) + ")");
    }
    for (int i = 0; i < n_nodes; ++i) {
      for (int j = 0; j < n_nodes; ++j) {
        var.lags[static_cast<std::size_t>(q)](i, j) = reader.number("var coefficient");
      }
    }
  }
  return var;
}

}  // namespace

void save_model(const NlVarModel& model, const std::filesystem::path& path) {
  check_feasible(model);
  auto out = open_output(path);
  out << "format_version " << kModelFormatVersion << '\n';
  out << "linear_identity_maps 0\n";
  out << "nodes " << model.shape.n_nodes << '\n';
  out << "order " << model.shape.order << '\n';
  out << "units " << model.shape.n_units << '\n';
  for (int i = 0; i < model.shape.n_nodes; ++i) {
    const auto& r = model.maps[static_cast<std::size_t>(i)].range;
    out << "range " << i << ' ' << format_double(r.lower) << ' ' << format_double(r.upper) << '\n';
  }
  write_var_block(out, model.var);
  for (int i = 0; i < model.shape.n_nodes; ++i) {
    const NodeMap& map = model.maps[static_cast<std::size_t>(i)];
    out << "map " << i << '\n';
    const auto write_vector = [&](const char* name, const Eigen::VectorXd& v) {
      out << name;
      for (int j = 0; j < v.size(); ++j) out << ' ' << format_double(v[j]);
      out << '\n';
    };
    write_vector("alpha", map.alpha);
    write_vector("weight", map.weight);
    write_vector("shift", map.shift);
    out << "bias " << format_double(map.bias) << '\n';
  }
  out << "end\n";
  if (!out) throw ValidationError("failed while writing " + path.string());
}

void save_linear_model(const VarCoefficients& var, const std::filesystem::path& path) {
  validate(var);
  auto out = open_output(path);
  out << "format_version " << kModelFormatVersion << '\n';
  out << "linear_identity_maps 1\n";
  out << "nodes " << var.n_nodes() << '\n';
  out << "order " << var.order() << '\n';
  out << "units 0\n";
  write_var_block(out, var);
  out << "end\n";
  if (!out) throw ValidationError("failed while writing " + path.string());
}

StoredModel load_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  TokenReader reader(in);

  reader.keyword("format_version");
  const long version = reader.integer("format version");
  if (version != kModelFormatVersion) {
    throw ValidationError("model file: unsupported format version " + std::to_string(version) +
                          " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
  }
  reader.keyword("linear_identity_maps");
  const long linear_flag = reader.integer("linear_identity_maps flag");
  if (linear_flag != 0 && linear_flag != 1) {
    throw ValidationError("model file: linear_identity_maps must be 0 or 1");
  }
  reader.keyword("nodes");
  const long n = reader.integer("node count");
  reader.keyword("order");
  const long p = reader.integer("order");
  reader.keyword("units");
  const long m = reader.integer("unit count");
  if (n < 1 || p < 1) throw ValidationError("model file: nodes and order must be >= 1");

  StoredModel stored;
  if (linear_flag == 1) {
    if (m != 0) throw ValidationError("model file: linear model must declare units 0");
    stored.linear = read_var_block(reader, static_cast<int>(p), static_cast<int>(n));
    reader.keyword("end");
    validate(*stored.linear);
    return stored;
  }

  if (m < 1) throw ValidationError("model file: nonlinear model must declare units >= 1");
  NlVarModel model;
  model.shape = ModelShape{static_cast<int>(n), static_cast<int>(p), static_cast<int>(m)};
  std::vector<RangeBounds> ranges(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    reader.keyword("range");
    const long index = reader.integer("range node index");
    if (index != i) throw ValidationError("model file: range blocks out of order");
    ranges[static_cast<std::size_t>(i)].lower = reader.number("range lower");
    ranges[static_cast<std::size_t>(i)].upper = reader.number("range upper");
  }
  model.var = read_var_block(reader, static_cast<int>(p), static_cast<int>(n));
  model.maps.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    NodeMap& map = model.maps[static_cast<std::size_t>(i)];
    map.range = ranges[static_cast<std::size_t>(i)];
    map.alpha.resize(m);
    map.weight.resize(m);
    map.shift.resize(m);
    reader.keyword("map");
    const long index = reader.integer("map node index");
    if (index != i) throw ValidationError("model file: map blocks out of order");
    reader.keyword("alpha");
    for (long j = 0; j < m; ++j) map.alpha[j] = reader.number("alpha value");
    reader.keyword("weight");
    for (long j = 0; j < m; ++j) map.weight[j] = reader.number("weight value");
    reader.keyword("shift");
    for (long j = 0; j < m; ++j) map.shift[j] = reader.number("shift value");
    reader.keyword("bias");
    map.bias = reader.number("bias value");
  }
  reader.keyword("end");
  check_feasible(model);
  stored.nonlinear = std::move(model);
  return stored;
}

ConfigMap read_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  ConfigMap values;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string cleaned = trim(line);
    if (cleaned.empty()) continue;
    const std::size_t eq = cleaned.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config " + path.string() + " line " + std::to_string(line_no) +
                            ": expected key=value");
    }
    const std::string key = trim(cleaned.substr(0, eq));
    const std::string value = trim(cleaned.substr(eq + 1));
    if (key.empty()) {
      throw ValidationError("config " + path.string() + " line " + std::to_string(line_no) +
                            ": empty key");
    }
    if (!values.emplace(key, value).second) {
      throw ValidationError("config " + path.string() + " line " + std::to_string(line_no) +
                            ": duplicate key '" + key + "'");
    }
  }
  return values;
}

const std::string* ConfigView::find(const std::string& key) {
  consumed_[key] = true;
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

long ConfigView::get_long(const std::string& key, long fallback) {
  const std::string* raw = find(key);
  const long value = raw ? parse_long(*raw, "config key '" + key + "'") : fallback;
  effective_[key] = std::to_string(value);
  return value;
}

double ConfigView::get_double(const std::string& key, double fallback) {
  const std::string* raw = find(key);
  const double value = raw ? parse_double(*raw, "config key '" + key + "'") : fallback;
  effective_[key] = format_double(value);
  return value;
}

std::uint64_t ConfigView::get_seed(const std::string& key, std::uint64_t fallback) {
  const std::string* raw = find(key);
  std::uint64_t value = fallback;
  if (raw) {
    const char* begin = raw->data();
    const char* end = begin + raw->size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      throw ValidationError("config key '" + key + "': cannot parse seed '" + *raw + "'");
    }
  }
  effective_[key] = std::to_string(value);
  return value;
}

std::string ConfigView::get_string(const std::string& key, const std::string& fallback) {
  const std::string* raw = find(key);
  const std::string value = raw ? *raw : fallback;
  effective_[key] = value;
  return value;
}

void ConfigView::reject_unknown_keys() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    const auto it = consumed_.find(key);
    if (it == consumed_.end() || !it->second) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) throw ValidationError("config: unknown keys: " + unknown);
}

void write_manifest(const ConfigMap& values, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& [key, value] : values) out << key << '=' << value << '\n';
  if (!out) throw ValidationError("failed while writing " + path.string());
}

}  // namespace nlvar
