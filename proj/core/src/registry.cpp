#include "obdeg/registry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "obdeg/errors.hpp"
#include "obdeg/reflector.hpp"
#include "obdeg/yamabe.hpp"

namespace obdeg {

namespace {

constexpr std::uint64_t kProbeSeed = 0x5eed;
constexpr std::size_t kProbeCount = 8;

// Consumes the allowed keys of params; anything left over is rejected.
class ParamReader {
 public:
  ParamReader(std::string owner, const ParameterMap& params) : owner_(std::move(owner)), params_(params) {}
  double get(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    if (!std::isfinite(it->second))
      throw Error(ErrorKind::configuration, owner_ + ": parameter '" + key + "' is not finite");
    return it->second;
  }
  void finish() const {
    for (const auto& [k, v] : params_)
      if (!used_.contains(k))
        throw Error(ErrorKind::configuration, owner_ + ": unknown parameter '" + k + "'");
  }

 private:
  std::string owner_;
  const ParameterMap& params_;
  std::set<std::string> used_;
};

double trace(const Mat2& r) { return r(0, 0) + r(1, 1); }

InteriorPartials laplacian_partials(double d_z) {
  return {Mat2::Identity(), Vec2::Zero(), d_z};
}

double h_of(const SemilinearParams& p, double z) { return z - z * z * z + p.shift; }
double dh_of(double z) { return 1.0 - 3.0 * z * z; }

struct Cubic {
  static double u(const Vec2& x) { return 0.5 + 0.4 * std::sin(x.x()) * std::cos(x.y()); }
  static Vec2 du(const Vec2& x) {
    return {0.4 * std::cos(x.x()) * std::cos(x.y()), -0.4 * std::sin(x.x()) * std::sin(x.y())};
  }
  static double lap(const Vec2& x) { return -0.8 * std::sin(x.x()) * std::cos(x.y()); }
};

}  // namespace

std::vector<ProbeState> random_probes(const DiscreteDomain& domain, std::uint64_t seed,
                                      std::size_t count, double z_lo, double z_hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), zdist(z_lo, z_hi);
  std::uniform_int_distribution<std::size_t> interior(0, domain.interior_count() - 1);
  std::uniform_int_distribution<std::size_t> boundary(0, domain.boundary_count() - 1);
  std::vector<ProbeState> out;
  for (std::size_t i = 0; i < count; ++i) {
    ProbeState st;
    st.node = i % 2 == 0 ? interior(rng) : domain.boundary_node(boundary(rng));
    st.z = zdist(rng);
    st.p = {unit(rng), unit(rng)};
    const double off = unit(rng);
    st.r << unit(rng), off, off, unit(rng);
    out.push_back(st);
  }
  return out;
}

ObliqueProblem laplace_robin_problem(DomainPtr domain, const LaplaceRobinParams& prm) {
  ProblemDefinition def;
  def.name = "laplace-robin";
  def.domain = domain;
  def.f = [prm](const NodeInfo&, double z, const Vec2&, const Mat2& r) {
    return trace(r) + prm.c * z - prm.source;
  };
  def.g = [prm](const NodeInfo& n, double z, const Vec2& p) {
    return p.dot(n.normal) + prm.robin * z - prm.boundary_value;
  };
  def.df = [prm](const NodeInfo&, double, const Vec2&, const Mat2&) { return laplacian_partials(prm.c); };
  def.dg = [prm](const NodeInfo& n, double, const Vec2&) { return BoundaryPartials{n.normal, prm.robin}; };
  def.probes = random_probes(*domain, kProbeSeed, kProbeCount);
  return ObliqueProblem(std::move(def));
}

ObliqueProblem semilinear_robin_problem(DomainPtr domain, const SemilinearParams& prm) {
  ProblemDefinition def;
  def.name = "semilinear-robin";
  def.domain = domain;
  def.f = [prm](const NodeInfo&, double z, const Vec2&, const Mat2& r) {
    return trace(r) + prm.alpha * h_of(prm, z);
  };
  def.g = [prm](const NodeInfo& n, double z, const Vec2& p) {
    return p.dot(n.normal) - prm.kappa * h_of(prm, z);
  };
  def.df = [prm](const NodeInfo&, double z, const Vec2&, const Mat2&) {
    return laplacian_partials(prm.alpha * dh_of(z));
  };
  def.dg = [prm](const NodeInfo& n, double z, const Vec2&) {
    return BoundaryPartials{n.normal, -prm.kappa * dh_of(z)};
  };
  def.probes = random_probes(*domain, kProbeSeed, kProbeCount, -1.5, 1.5);
  return ObliqueProblem(std::move(def));
}

std::vector<double> semilinear_constant_zeros(const SemilinearParams& prm) {
  // Roots of z^3 - z - shift = 0.
  const double s = prm.shift;
  std::vector<double> roots;
  const double disc = 4.0 - 27.0 * s * s;
  if (disc > 0.0) {
    const double m = 2.0 / std::sqrt(3.0);
    const double phi = std::acos(std::clamp(1.5 * std::sqrt(3.0) * s, -1.0, 1.0)) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0));
  } else {
    const double q = -s, d = std::sqrt(std::max(0.0, s * s / 4.0 - 1.0 / 27.0));
    roots.push_back(std::cbrt(-q / 2.0 + d) + std::cbrt(-q / 2.0 - d));
  }
  for (double& z : roots)
    for (int it = 0; it < 3; ++it) {
      const double d = dh_of(z);
      if (d != 0.0) z -= h_of(prm, z) / d;
    }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<std::string> manufactured_ids() { return {"quadratic", "cubic"}; }

ObliqueProblem manufactured_problem(DomainPtr domain, const std::string& id) {
  ProblemDefinition def;
  def.name = "manufactured:" + id;
  def.domain = domain;
  if (id == "quadratic") {
    def.f = [](const NodeInfo&, double, const Vec2&, const Mat2& r) { return trace(r) - 4.0; };
    def.g = [](const NodeInfo& n, double z, const Vec2& p) {
      return p.dot(n.normal) + z - (2.0 * n.x.dot(n.normal) + n.x.squaredNorm());
    };
    def.df = [](const NodeInfo&, double, const Vec2&, const Mat2&) { return laplacian_partials(0.0); };
    def.dg = [](const NodeInfo& n, double, const Vec2&) { return BoundaryPartials{n.normal, 1.0}; };
  } else if (id == "cubic") {
    def.f = [](const NodeInfo& n, double z, const Vec2&, const Mat2& r) {
      const double us = Cubic::u(n.x);
      return trace(r) - z * z * z - (Cubic::lap(n.x) - us * us * us);
    };
    def.g = [](const NodeInfo& n, double z, const Vec2& p) {
      return p.dot(n.normal) + z - (Cubic::du(n.x).dot(n.normal) + Cubic::u(n.x));
    };
    def.df = [](const NodeInfo&, double z, const Vec2&, const Mat2&) {
      return laplacian_partials(-3.0 * z * z);
    };
    def.dg = [](const NodeInfo& n, double, const Vec2&) { return BoundaryPartials{n.normal, 1.0}; };
  } else {
    throw Error(ErrorKind::configuration, "unknown manufactured problem '" + id + "'");
  }
  def.probes = random_probes(*domain, kProbeSeed, kProbeCount);
  return ObliqueProblem(std::move(def));
}

ScalarField manufactured_solution(DomainPtr domain, const std::string& id) {
  if (id == "quadratic") return ScalarField::sample(domain, [](const Vec2& x) { return x.squaredNorm(); });
  if (id == "cubic") return ScalarField::sample(domain, [](const Vec2& x) { return Cubic::u(x); });
  throw Error(ErrorKind::configuration, "unknown manufactured problem '" + id + "'");
}

ProblemFamily fold_family(DomainPtr domain, SemilinearParams base, double s0, double s1) {
  return [domain, base, s0, s1](double t) {
    SemilinearParams p = base;
    p.shift = s0 + t * (s1 - s0);
    return semilinear_robin_problem(domain, p);
  };
}

ProblemFamily linear_to_semilinear_family(DomainPtr domain, SemilinearParams base, double q) {
  const auto probes = random_probes(*domain, kProbeSeed, kProbeCount, -1.5, 1.5);
  return [domain, base, q, probes](double t) {
    ProblemDefinition def;
    def.name = "linear-to-semilinear";
    def.domain = domain;
    def.f = [base, q, t](const NodeInfo&, double z, const Vec2&, const Mat2& r) {
      return trace(r) + (1.0 - t) * (q - z) + t * base.alpha * h_of(base, z);
    };
    def.g = [base, q, t](const NodeInfo& n, double z, const Vec2& p) {
      return p.dot(n.normal) + (1.0 - t) * (z - q) - t * base.kappa * h_of(base, z);
    };
    def.df = [base, t](const NodeInfo&, double z, const Vec2&, const Mat2&) {
      return laplacian_partials(-(1.0 - t) + t * base.alpha * dh_of(z));
    };
    def.dg = [base, t](const NodeInfo& n, double z, const Vec2&) {
      return BoundaryPartials{n.normal, (1.0 - t) - t * base.kappa * dh_of(z)};
    };
    def.probes = probes;
    return ObliqueProblem(std::move(def));
  };
}

ProblemFamily bratu_family(DomainPtr domain, double lambda_max) {
  const auto probes = random_probes(*domain, kProbeSeed, kProbeCount);
  return [domain, lambda_max, probes](double t) {
    const double lam = t * lambda_max;
    ProblemDefinition def;
    def.name = "bratu-robin";
    def.domain = domain;
    def.f = [lam](const NodeInfo&, double z, const Vec2&, const Mat2& r) {
      return trace(r) + lam * std::exp(z);
    };
    def.g = [](const NodeInfo& n, double z, const Vec2& p) { return p.dot(n.normal) + z; };
    def.df = [lam](const NodeInfo&, double z, const Vec2&, const Mat2&) {
      return laplacian_partials(lam * std::exp(z));
    };
    def.dg = [](const NodeInfo& n, double, const Vec2&) { return BoundaryPartials{n.normal, 1.0}; };
    def.probes = probes;
    return ObliqueProblem(std::move(def));
  };
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names{"laplace-robin", "semilinear-robin", "reflector", "yamabe-sigma1"};
  for (const auto& id : manufactured_ids()) names.push_back("manufactured:" + id);
  return names;
}

ObliqueProblem make_problem(const std::string& name, DomainPtr domain, const ParameterMap& params) {
  if (!domain) throw Error(ErrorKind::configuration, "problem '" + name + "' needs a domain");
  ParamReader in(name, params);
  if (name == "laplace-robin") {
    LaplaceRobinParams p;
    p.c = in.get("c", p.c);
    p.robin = in.get("robin", p.robin);
    p.source = in.get("source", p.source);
    p.boundary_value = in.get("boundary_value", p.boundary_value);
    in.finish();
    return laplace_robin_problem(std::move(domain), p);
  }
  if (name == "semilinear-robin") {
    SemilinearParams p;
    p.alpha = in.get("alpha", p.alpha);
    p.kappa = in.get("kappa", p.kappa);
    p.shift = in.get("shift", p.shift);
    in.finish();
    return semilinear_robin_problem(std::move(domain), p);
  }
  if (name == "reflector") {
    const double eps = in.get("eps", 0.0);
    in.finish();
    ReflectorProblem rp = manufacture(example_reflector_solution().sample(domain), example_target_intensity());
    rp.eps = eps;
    return reflector_oblique_problem(rp);
  }
  if (name == "yamabe-sigma1") {
    YamabeConfig cfg;
    const double n = in.get("n", cfg.n);
    if (n != std::floor(n) || n > 1000.0) throw Error(ErrorKind::configuration, "yamabe-sigma1: n must be an integer");
    cfg.n = static_cast<int>(n);
    cfg.c = in.get("c", cfg.c);
    cfg.h_g = in.get("h_g", cfg.h_g);
    in.finish();
    return yamabe_problem(std::move(domain), cfg);
  }
  if (name.starts_with("manufactured:")) {
    in.finish();
    return manufactured_problem(std::move(domain), name.substr(13));
  }
  throw Error(ErrorKind::configuration, "unknown problem '" + name + "'");
}

std::vector<std::string> family_names() { return {"fold", "linear-to-semilinear", "bratu"}; }

ProblemFamily make_family(const std::string& name, DomainPtr domain, const ParameterMap& params) {
  if (!domain) throw Error(ErrorKind::configuration, "family '" + name + "' needs a domain");
  ParamReader in(name, params);
  SemilinearParams base;
  if (name == "fold") {
    base.alpha = in.get("alpha", base.alpha);
    base.kappa = in.get("kappa", base.kappa);
    const double s0 = in.get("s0", -0.3), s1 = in.get("s1", 0.7);
    in.finish();
    return fold_family(std::move(domain), base, s0, s1);
  }
  if (name == "linear-to-semilinear") {
    base.alpha = in.get("alpha", base.alpha);
    base.kappa = in.get("kappa", base.kappa);
    base.shift = in.get("shift", base.shift);
    const double q = in.get("q", 1.2);
    in.finish();
    return linear_to_semilinear_family(std::move(domain), base, q);
  }
  if (name == "bratu") {
    const double lam = in.get("lambda_max", 0.55);
    in.finish();
    return bratu_family(std::move(domain), lam);
  }
  throw Error(ErrorKind::configuration, "unknown family '" + name + "'");
}

}  // namespace obdeg
