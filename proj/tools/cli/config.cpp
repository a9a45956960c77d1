#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace obdeg::cli {

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

}  // namespace

json parse_config(const std::string& text, const std::string& source) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    const auto pos = what.find("; ");
    if (pos != std::string::npos) what = what.substr(pos + 2);
    throw ConfigError(source + ":" + line_column(text, at) + ": " + what);
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Section::Section(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
  if (!j.is_object()) throw ConfigError((path_.empty() ? "/" : path_) + ": expected an object");
}

bool Section::has(const std::string& key) const { return j_->contains(key); }

const json& Section::at(const std::string& key) const {
  used_.insert(key);
  const auto it = j_->find(key);
  if (it == j_->end()) throw ConfigError(join(path_, key) + ": required field is missing");
  return *it;
}

void Section::type_error(const std::string& key, const char* expected) const {
  throw ConfigError(join(path_, key) + ": expected " + expected);
}

Section Section::child(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_object()) type_error(key, "an object");
  return Section(v, join(path_, key));
}

std::optional<Section> Section::optional_child(const std::string& key) const {
  if (!has(key)) {
    used_.insert(key);
    return std::nullopt;
  }
  return child(key);
}

double Section::number(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_number()) type_error(key, "a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) type_error(key, "a finite number");
  return d;
}

double Section::number(const std::string& key, double fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  return number(key);
}

int Section::integer(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_number_integer()) type_error(key, "an integer");
  const auto i = v.get<std::int64_t>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max())
    type_error(key, "an integer in int range");
  return static_cast<int>(i);
}

int Section::integer(const std::string& key, int fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  return integer(key);
}

std::uint64_t Section::unsigned_integer(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  const json& v = at(key);
  if (!v.is_number_unsigned()) type_error(key, "a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool Section::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  const json& v = at(key);
  if (!v.is_boolean()) type_error(key, "true or false");
  return v.get<bool>();
}

std::string Section::string(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_string()) type_error(key, "a string");
  return v.get<std::string>();
}

std::string Section::string(const std::string& key, const std::string& fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  return string(key);
}

std::vector<double> Section::numbers(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_array()) type_error(key, "an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) type_error(key, "an array of finite numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> Section::numbers(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  return numbers(key);
}

std::vector<std::string> Section::strings(const std::string& key, std::vector<std::string> fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  const json& v = at(key);
  if (!v.is_array()) type_error(key, "an array of strings");
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string()) type_error(key, "an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Vec2 Section::point(const std::string& key) const {
  const std::vector<double> v = numbers(key);
  if (v.size() != 2) type_error(key, "a point [x, y]");
  return {v[0], v[1]};
}

Vec2 Section::point(const std::string& key, Vec2 fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  return point(key);
}

ParameterMap Section::parameters(const std::string& key) const {
  ParameterMap out;
  if (!has(key)) {
    used_.insert(key);
    return out;
  }
  const json& v = at(key);
  if (!v.is_object()) type_error(key, "an object of numbers");
  for (const auto& [k, e] : v.items()) {
    if (!e.is_number() || !std::isfinite(e.get<double>()))
      throw ConfigError(join(join(path_, key), k) + ": expected a finite number");
    out[k] = e.get<double>();
  }
  return out;
}

void Section::finish() const {
  for (const auto& [k, v] : j_->items())
    if (!used_.contains(k)) throw ConfigError(join(path_, k) + ": unknown key '" + k + "'");
}

DomainPtr DomainSpec::build() const {
  if (radius.is_constant()) return build_disk(n_r, n_theta, radius.a0());
  return build_star(radius, n_r, n_theta);
}

json DomainSpec::echo() const {
  json j;
  if (radius.is_constant()) {
    j["shape"] = "disk";
    j["radius"] = radius.a0();
  } else {
    j["shape"] = "star";
    j["a0"] = radius.a0();
    j["cos"] = radius.cos_coeffs();
    j["sin"] = radius.sin_coeffs();
  }
  j["n_r"] = n_r;
  j["n_theta"] = n_theta;
  return j;
}

DomainSpec read_domain(const Section& s) {
  DomainSpec d;
  const std::string shape = s.string("shape");
  if (shape == "disk") {
    d.radius = RadiusFunction::constant(s.number("radius", 1.0));
  } else if (shape == "star") {
    d.radius = RadiusFunction(s.number("a0"), s.numbers("cos", {}), s.numbers("sin", {}));
  } else {
    throw ConfigError(s.path() + "/shape: expected \"disk\" or \"star\", got \"" + shape + "\"");
  }
  d.n_r = s.integer("n_r", d.n_r);
  d.n_theta = s.integer("n_theta", d.n_theta);
  s.finish();
  return d;
}

NewtonOptions read_newton(const std::optional<Section>& s) {
  NewtonOptions o;
  if (!s) return o;
  o.tolerance = s->number("tolerance", o.tolerance);
  o.max_iterations = s->integer("max_iterations", o.max_iterations);
  o.damping_min = s->number("damping_min", o.damping_min);
  o.lambda_min = s->number("lambda_min", o.lambda_min);
  o.chi_min = s->number("chi_min", o.chi_min);
  o.norm_cap = s->number("norm_cap", o.norm_cap);
  s->finish();
  return o;
}

ContinuationSchedule read_schedule(const std::optional<Section>& s) {
  ContinuationSchedule c;
  if (!s) return c;
  c.dt_initial = s->number("dt_initial", c.dt_initial);
  c.dt_min = s->number("dt_min", c.dt_min);
  c.dt_max = s->number("dt_max", c.dt_max);
  c.secant_predictor = s->boolean("secant_predictor", c.secant_predictor);
  c.newton = read_newton(s->optional_child("newton"));
  s->finish();
  return c;
}

EigenOptions read_eigen(const std::optional<Section>& s) {
  EigenOptions e;
  if (!s) return e;
  e.real_tolerance = s->number("real_tolerance", e.real_tolerance);
  e.degeneracy_tolerance = s->number("degeneracy_tolerance", e.degeneracy_tolerance);
  e.infinite_beta = s->number("infinite_beta", e.infinite_beta);
  s->finish();
  return e;
}

json newton_echo(const NewtonOptions& o) {
  return {{"tolerance", o.tolerance},     {"max_iterations", o.max_iterations}, {"damping_min", o.damping_min},
          {"lambda_min", o.lambda_min},   {"chi_min", o.chi_min},               {"norm_cap", o.norm_cap}};
}

json schedule_echo(const ContinuationSchedule& s) {
  return {{"dt_initial", s.dt_initial},
          {"dt_min", s.dt_min},
          {"dt_max", s.dt_max},
          {"secant_predictor", s.secant_predictor},
          {"newton", newton_echo(s.newton)}};
}

}  // namespace obdeg::cli
