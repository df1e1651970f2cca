#include "geofront/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace geofront {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw ConfigError(key, "bad value for " + key + ": " + v);
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw ConfigError(key, "bad value for " + key + ": " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key, "bad value for " + key + ": " + v);
}

std::string real_text(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "ell",       "mu",        "alpha",         "sigma",          "beta",           "rho",
      "q",         "a",         "model",         "em_iters",       "bins",           "bandwidth",
      "max_iters", "stop_fraction", "stencil_radius", "symmetric_mode", "single_metric_mode", "seed"};
  return keys;
}

void apply_config_entry(DualFrontConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(raw_value);
  if (key == "ell") {
    c.ell = parse_real(key, v);
  } else if (key == "mu") {
    c.mu = parse_real(key, v);
  } else if (key == "alpha") {
    c.alpha = parse_real(key, v);
  } else if (key == "sigma") {
    c.sigma = parse_real(key, v);
  } else if (key == "beta") {
    c.beta = parse_real(key, v);
  } else if (key == "rho") {
    c.rho = parse_real(key, v);
  } else if (key == "q") {
    c.q = parse_real(key, v);
  } else if (key == "a") {
    c.a = parse_real(key, v);
  } else if (key == "model") {
    ModelSpec m;
    try {
      m = ModelSpec::parse(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
    m.em_iters = c.model.em_iters;
    m.bins = c.model.bins;
    m.bandwidth = c.model.bandwidth;
    c.model = m;
  } else if (key == "em_iters") {
    c.model.em_iters = static_cast<int>(parse_int(key, v));
  } else if (key == "bins") {
    c.model.bins = static_cast<int>(parse_int(key, v));
  } else if (key == "bandwidth") {
    c.model.bandwidth = parse_real(key, v);
  } else if (key == "max_iters") {
    c.max_iters = static_cast<int>(parse_int(key, v));
  } else if (key == "stop_fraction") {
    c.stop_fraction = parse_real(key, v);
  } else if (key == "stencil_radius") {
    if (v == "auto") {
      c.stencil_radius.reset();
    } else {
      c.stencil_radius = static_cast<int>(parse_int(key, v));
    }
  } else if (key == "symmetric_mode") {
    c.symmetric_mode = parse_bool(key, v);
  } else if (key == "single_metric_mode") {
    c.single_metric_mode = parse_bool(key, v);
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw ConfigError(key, "bad value for seed: " + v);
    c.seed = static_cast<std::uint64_t>(s);
  } else {
    throw ConfigError(key, "unknown config key: " + key);
  }
}

void apply_config_assignment(DualFrontConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(trim(assignment), "expected key=value, got: " + assignment);
  apply_config_entry(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void apply_config_text(DualFrontConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    apply_config_assignment(config, line);
  }
}

void apply_config_file(DualFrontConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(config, ss.str());
}

std::string format_config(const DualFrontConfig& c) {
  std::ostringstream os;
  os << "ell=" << real_text(c.ell) << '\n'
     << "mu=" << real_text(c.mu) << '\n'
     << "alpha=" << real_text(c.alpha) << '\n'
     << "sigma=" << real_text(c.sigma) << '\n'
     << "beta=" << real_text(c.beta) << '\n'
     << "rho=" << real_text(c.rho) << '\n'
     << "q=" << real_text(c.q) << '\n'
     << "a=" << real_text(c.a) << '\n'
     << "model=" << c.model.name() << '\n'
     << "em_iters=" << c.model.em_iters << '\n'
     << "bins=" << c.model.bins << '\n'
     << "bandwidth=" << real_text(c.model.bandwidth) << '\n'
     << "max_iters=" << c.max_iters << '\n'
     << "stop_fraction=" << real_text(c.stop_fraction) << '\n'
     << "stencil_radius=" << (c.stencil_radius ? std::to_string(*c.stencil_radius) : std::string("auto")) << '\n'
     << "symmetric_mode=" << (c.symmetric_mode ? "true" : "false") << '\n'
     << "single_metric_mode=" << (c.single_metric_mode ? "true" : "false") << '\n'
     << "seed=" << c.seed << '\n';
  return os.str();
}

}  // namespace geofront
