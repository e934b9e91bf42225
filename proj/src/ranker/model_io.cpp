#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dvr/ranker.hpp"

namespace dvr::ranker {

namespace {

constexpr std::string_view kMagic = "dvr-model v1";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || *end != '\0' || errno == ERANGE)
    throw Error(ErrorKind::ModelFormat, "bad number '" + token + "'");
  return v;
}

long parse_int(const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (token.empty() || *end != '\0' || errno == ERANGE)
    throw Error(ErrorKind::ModelFormat, "bad integer '" + token + "'");
  return v;
}

std::string header_value(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ModelFormat, "truncated header, expected " + std::string(key));
  const auto space = line.find(' ');
  if (space == std::string::npos || line.substr(0, space) != key)
    throw Error(ErrorKind::ModelFormat, "expected header field '" + std::string(key) + "', got '" + line + "'");
  return line.substr(space + 1);
}

}  // namespace

std::string serialize_model(const RankModel& model) {
  std::ostringstream out;
  out << kMagic << '\n'
      << "dim " << model.w.size() << '\n'
      << "C " << format_double(model.C) << '\n'
      << "k " << model.k << '\n'
      << "feature_mode " << features::feature_mode_name(model.feature_mode) << '\n'
      << "converged " << (model.converged ? 1 : 0) << '\n'
      << "iterations " << model.iterations << '\n';
  for (Eigen::Index i = 0; i < model.w.size(); ++i) out << format_double(model.w[i]) << '\n';
  return out.str();
}

RankModel parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw Error(ErrorKind::ModelFormat, "missing 'dvr-model v1' header");

  RankModel model;
  const long dim = parse_int(header_value(in, "dim"));
  if (dim < 1) throw Error(ErrorKind::ModelFormat, "descriptor length must be positive");
  model.C = parse_double(header_value(in, "C"));
  model.k = static_cast<int>(parse_int(header_value(in, "k")));
  try {
    model.feature_mode = features::parse_feature_mode(header_value(in, "feature_mode"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ModelFormat) throw;
    throw Error(ErrorKind::ModelFormat, e.what());
  }
  model.converged = parse_int(header_value(in, "converged")) != 0;
  model.iterations = static_cast<int>(parse_int(header_value(in, "iterations")));

  model.w.resize(dim);
  for (long i = 0; i < dim; ++i) {
    if (!std::getline(in, line))
      throw Error(ErrorKind::ModelFormat, "expected " + std::to_string(dim) + " weights, got " + std::to_string(i));
    model.w[i] = parse_double(line);
  }
  while (std::getline(in, line))
    if (!line.empty()) throw Error(ErrorKind::ModelFormat, "trailing data after weights");
  return model;
}

void save_model(const std::string& path, const RankModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write model " + path);
  out << serialize_model(model);
}

RankModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read model " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace dvr::ranker
