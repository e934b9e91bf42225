#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dvr/cli.hpp"

namespace dvr::cli {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw Error(ErrorKind::ConfigError, "invalid value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void Config::validate() const {
  if (L < 1) throw Error(ErrorKind::ConfigError, "L must be >= 1");
  if (!(negative_fraction > 0.0 && negative_fraction <= 1.0))
    throw Error(ErrorKind::ConfigError, "negative_fraction must lie in (0, 1]");
  if (!(C > 0.0)) throw Error(ErrorKind::ConfigError, "C must be > 0");
  if (k < 1) throw Error(ErrorKind::ConfigError, "k must be >= 1");
  if (sigma < 0.0) throw Error(ErrorKind::ConfigError, "sigma must be >= 0");
  if (max_iters < 1) throw Error(ErrorKind::ConfigError, "max_iters must be >= 1");
  if (!(solver_tolerance > 0.0)) throw Error(ErrorKind::ConfigError, "solver_tolerance must be > 0");
  if (solver_max_newton < 1) throw Error(ErrorKind::ConfigError, "solver_max_newton must be >= 1");
  if (!(flow_lambda > 0.0)) throw Error(ErrorKind::ConfigError, "flow_lambda must be > 0");
  if (flow_iterations < 1) throw Error(ErrorKind::ConfigError, "flow_iterations must be >= 1");
}

features::FeatureConfig Config::feature_config() const {
  features::FeatureConfig fc;
  fc.mode = feature_mode;
  fc.hog3d.fragment_length = 2 * L + 1;
  return fc;
}

ranker::TrainOptions Config::train_options() const {
  ranker::TrainOptions opts;
  opts.C = C;
  opts.k = k;
  opts.max_iters = max_iters;
  opts.solver.tolerance = solver_tolerance;
  opts.solver.max_newton_steps = solver_max_newton;
  return opts;
}

void apply_setting(Config& c, std::string_view key, std::string_view value) {
  if (key == "L") c.L = parse_number<int>(key, value);
  else if (key == "sigma") c.sigma = parse_number<double>(key, value);
  else if (key == "C") c.C = parse_number<double>(key, value);
  else if (key == "k") c.k = parse_number<int>(key, value);
  else if (key == "negative_fraction") c.negative_fraction = parse_number<double>(key, value);
  else if (key == "feature_mode") c.feature_mode = features::parse_feature_mode(value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "max_iters") c.max_iters = parse_number<int>(key, value);
  else if (key == "solver_tolerance") c.solver_tolerance = parse_number<double>(key, value);
  else if (key == "solver_max_newton") c.solver_max_newton = parse_number<int>(key, value);
  else if (key == "flow_lambda") c.flow_lambda = parse_number<double>(key, value);
  else if (key == "flow_iterations") c.flow_iterations = parse_number<int>(key, value);
  else throw Error(ErrorKind::ConfigError, "unknown config key '" + std::string(key) + "'");
}

std::string serialize_config(const Config& c) {
  std::ostringstream out;
  out << "L=" << c.L << '\n'
      << "sigma=" << format_double(c.sigma) << '\n'
      << "C=" << format_double(c.C) << '\n'
      << "k=" << c.k << '\n'
      << "negative_fraction=" << format_double(c.negative_fraction) << '\n'
      << "feature_mode=" << features::feature_mode_name(c.feature_mode) << '\n'
      << "seed=" << c.seed << '\n'
      << "max_iters=" << c.max_iters << '\n'
      << "solver_tolerance=" << format_double(c.solver_tolerance) << '\n'
      << "solver_max_newton=" << c.solver_max_newton << '\n'
      << "flow_lambda=" << format_double(c.flow_lambda) << '\n'
      << "flow_iterations=" << c.flow_iterations << '\n';
  return out.str();
}

Config parse_config(std::string_view text, Config base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::ConfigError, "config line " + std::to_string(line_no) + " lacks '='");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.validate();
  return base;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

void save_config(const std::filesystem::path& path, const Config& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write config " + path.string());
  out << serialize_config(config);
}

}  // namespace dvr::cli
