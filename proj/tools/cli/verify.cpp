#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "obdeg/linops.hpp"

namespace obdeg::cli {

namespace {

struct Mesh {
  int n_r, n_theta;
  json echo() const { return {n_r, n_theta}; }
};

// coarse/fine: one mesh doubling for the refinement checks; operator: the
// mesh for dense SVD and eigen work.
struct Preset {
  std::string name;
  Mesh coarse, fine, op;
};

Preset preset_by_name(const std::string& name) {
  if (name == "small") return {name, {12, 24}, {24, 48}, {16, 32}};
  if (name == "medium") return {name, {16, 32}, {32, 64}, {24, 48}};
  throw ConfigError("/preset: expected \"small\" or \"medium\", got \"" + name + "\"");
}

DomainPtr unit_disk(const Mesh& m) { return build_disk(m.n_r, m.n_theta, 1.0); }

std::vector<Mat2> identity_a(const DiscreteDomain& d) { return std::vector<Mat2>(d.node_count(), Mat2::Identity()); }
std::vector<Vec2> normal_b(const DiscreteDomain& d) {
  return std::vector<Vec2>(d.gamma().begin(), d.gamma().end());
}

// Random trigonometric data with modes 1..4 and coefficients decaying like 1/k^2.
struct RandomModes {
  std::vector<double> c, s;
  double offset;

  RandomModes(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    offset = u(rng);
    for (int k = 1; k <= 4; ++k) {
      c.push_back(u(rng) / (k * k));
      s.push_back(u(rng) / (k * k));
    }
  }
  double operator()(double theta) const {
    double v = offset;
    for (std::size_t k = 0; k < c.size(); ++k)
      v += c[k] * std::cos((k + 1.0) * theta) + s[k] * std::sin((k + 1.0) * theta);
    return v;
  }
};

BoundaryField boundary_data(const DomainPtr& d, const std::function<double(double)>& g) {
  return BoundaryField::sample(d, [&](const Vec2& x) { return g(std::atan2(x.y(), x.x())); });
}

double rellich(const Mesh& m, const std::function<double(double)>& g) {
  const DomainPtr d = unit_disk(m);
  return rellich_ratio(d, identity_a(*d), normal_b(*d), boundary_data(d, g));
}

using CheckFn = std::function<void(Report&)>;

class VerifyCommand : public Command {
 public:
  explicit VerifyCommand(const Section& root)
      : preset_(preset_by_name(root.string("preset", "small"))),
        checks_(root.strings("checks", verify_check_names())),
        random_samples_(root.integer("random_samples", 10)) {
    const auto known = verify_check_names();
    for (const std::string& c : checks_)
      if (std::find(known.begin(), known.end(), c) == known.end())
        throw ConfigError("/checks: unknown check '" + c + "'");
    if (random_samples_ < 1) throw ConfigError("/random_samples: must be positive");
  }

  json echo() const override {
    return {{"preset", preset_.name},
            {"meshes", {{"coarse", preset_.coarse.echo()}, {"fine", preset_.fine.echo()}, {"operator", preset_.op.echo()}}},
            {"checks", checks_},
            {"random_samples", random_samples_}};
  }

  void run(const RunContext& ctx, Report& summary) override {
    const std::map<std::string, CheckFn> table = checks(ctx.seed);
    json results = json::array();
    bool all = true;
    for (const std::string& name : checks_) {
      Report r(ctx.name + "-" + name, "verify:" + name, ctx.seed, echo_for(name));
      try {
        table.at(name)(r);
      } catch (const std::exception& e) {
        r.record_error(e);
      }
      r.write(ctx.out_dir, r.name());
      const bool ok = r.passed();
      all = all && ok;
      results.push_back({{"check", name}, {"report", r.name() + ".report.json"}, {"pass", ok}});
      *ctx.log << (ok ? "PASS " : "FAIL ") << name << "\n";
    }
    summary.measure("checks", results);
    summary.check_flag("all-checks-pass", all);
  }

 private:
  json echo_for(const std::string& check) const {
    json j = echo();
    j.erase("checks");
    j["check"] = check;
    return j;
  }

  std::map<std::string, CheckFn> checks(std::uint64_t seed) const {
    const Preset p = preset_;
    const int samples = random_samples_;
    std::map<std::string, CheckFn> t;

    t["resolvent-bound"] = [](Report& r) {
      json values = json::object();
      double worst = 0.0;
      for (double N : {1.0, 2.0, 4.0, 16.0, 256.0}) {
        const double v = resolvent_symbol_bound(N, 512);
        values[format_N(N)] = v;
        worst = std::max(worst, v);
      }
      r.measure("bound", values);
      r.check("sup-over-N", worst, "<=", 1.0 + 1e-12);
      r.check("exact-at-N1", std::abs(resolvent_symbol_bound(1.0, 512) - 1.0), "==", 0.0);
      r.check("k0-term-N4", std::abs(resolvent_symbol_bound(4.0, 0) - 0.25), "<=", 1e-15);
    };

    t["rellich-constant"] = [p](Report& r) {
      const double ratio = rellich(p.fine, [](double) { return 1.0; });
      r.measure("ratio", ratio);
      r.check("ratio-minus-1", std::abs(ratio - 1.0), "<=", 1e-2);
    };

    t["rellich-cos"] = [p](Report& r) {
      const double exact = (1.0 + std::numbers::sqrt2) / 2.0;
      const auto g = [](double th) { return std::cos(th); };
      const double coarse = rellich(p.coarse, g), fine = rellich(p.fine, g);
      r.measure("coarse", coarse);
      r.measure("fine", fine);
      r.measure("exact", exact);
      r.check("relative-error-fine", std::abs(fine - exact) / exact, "<=", 0.02);
      r.check("error-decreases", std::abs(fine - exact), "<=", std::abs(coarse - exact));
    };

    t["rellich-refinement"] = [p, seed, samples](Report& r) {
      std::mt19937_64 rng(seed);
      json ratios = json::array();
      double worst = 0.0;
      for (int k = 0; k < samples; ++k) {
        const RandomModes g(rng);
        const double a = rellich(p.coarse, g), b = rellich(p.fine, g);
        ratios.push_back({a, b});
        worst = std::max(worst, std::abs(b - a) / b);
      }
      r.measure("ratios_coarse_fine", ratios);
      r.check("max-relative-change", worst, "<", 0.05);
    };

    t["kernel-estimate"] = [p, seed, samples](Report& r) {
      std::mt19937_64 rng(seed + 1);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const double N = 16.0;
      json ratios = json::array();
      double growth = 0.0;
      for (int k = 0; k < samples; ++k) {
        const double ax = u(rng) * 2, ay = u(rng) * 2, ph = u(rng) * 3, c0 = u(rng);
        const auto phi = [&](const Vec2& x) { return c0 + std::sin(ax * x.x() + ay * x.y() + ph); };
        double pair[2];
        int i = 0;
        for (const Mesh& m : {p.coarse, p.fine}) {
          const DomainPtr d = unit_disk(m);
          pair[i++] = kernel_estimate_ratio(d, identity_a(*d), normal_b(*d), N, ScalarField::sample(d, phi));
        }
        ratios.push_back({pair[0], pair[1]});
        growth = std::max(growth, pair[1] / pair[0]);
      }
      r.measure("N", N);
      r.measure("ratios_coarse_fine", ratios);
      r.check("growth-per-doubling", growth, "<=", 2.0);
    };

    t["threshold"] = [p](Report& r) {
      const DomainPtr d = unit_disk(p.op);
      const ThresholdResult res = find_N0(d, identity_a(*d), normal_b(*d), 256.0);
      json prof = json::array();
      double worst_drop = INFINITY;
      for (std::size_t k = 0; k < res.profile.size(); ++k) {
        const auto& s = res.profile[k];
        prof.push_back({{"N", s.N}, {"sigma_min", s.sigma_min}, {"sigma_max", s.sigma_max}});
        if (k > 0 && res.profile[k - 1].N >= res.N0)
          worst_drop = std::min(worst_drop, s.sigma_min / res.profile[k - 1].sigma_min);
      }
      r.measure("profile", prof);
      r.measure("N0", res.N0);
      r.check("N0", res.N0, "<=", 256.0);
      if (std::isfinite(worst_drop)) r.check("sigma-min-ratio-above-N0", worst_drop, ">=", 1.0);
    };

    t["surjectivity"] = [p](Report& r) {
      const DomainPtr d = unit_disk(p.op);
      const double N0 = find_N0(d, identity_a(*d), normal_b(*d), 256.0).N0;
      const double N = 2.0 * N0 <= 256.0 ? 2.0 * N0 : N0;
      json rows = json::array();
      double worst = INFINITY;
      for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const SingularValueCheck c = certify_invertible(assemble_Mt(d, N, t).matrix);
        rows.push_back({{"t", t}, {"sigma_min", c.sigma_min}, {"sigma_max", c.sigma_max}});
        worst = std::min(worst, c.sigma_min / c.sigma_max);
      }
      r.measure("N", N);
      r.measure("samples", rows);
      r.check("min-relative-sigma", worst, ">", 1e-10);
    };

    t["semifiniteness"] = [p](Report& r) {
      const DomainPtr d = unit_disk(p.op);
      const SemifinitenessResult base = semifiniteness_mu(laplace_robin_pair(d, 0.0, 1.0));
      const SemifinitenessResult shifted = semifiniteness_mu(laplace_robin_pair(d, 7.0, 1.0));
      r.measure("mu_star", base.mu_star);
      r.measure("mu_star_shifted", shifted.mu_star);
      r.check("mu-star", base.mu_star, "<", 0.0);
      r.check("shift-error", std::abs(shifted.mu_star - base.mu_star - 7.0), "<=", 1e-8);
      const double rc = shifted_rcond(laplace_robin_pair(d, 0.0, 1.0), base.mu_star + 1.0);
      r.measure("rcond_at_mu_star_plus_1", rc);
      r.check("rcond-at-mu-star-plus-1", rc, ">", 1e-12);
    };

    t["frozen-split"] = [p, seed](Report& r) {
      const DomainPtr d = unit_disk(p.op);
      const ObliqueProblem prob = semilinear_robin_problem(d);
      std::mt19937_64 rng(seed + 2);
      const RandomModes m(rng);
      const ScalarField u = ScalarField::sample(d, [&](const Vec2& x) {
        return 0.3 * m(std::atan2(x.y(), x.x())) * x.squaredNorm() + 0.2 * x.x();
      });
      const FrozenSplit fs = frozen_split(prob, u, 16.0);
      double worst = 0.0;
      const auto rel = [&](const Eigen::VectorXd& l, const Eigen::VectorXd& rr, const Eigen::VectorXd& c) {
        const double scale = std::max(1.0, c.lpNorm<Eigen::Infinity>());
        worst = std::max(worst, (l + rr - c).lpNorm<Eigen::Infinity>() / scale);
      };
      rel(fs.l_part.l1, fs.r_part.l1, fs.composed.l1);
      rel(fs.l_part.l2, fs.r_part.l2, fs.composed.l2);
      rel(fs.l_part.l3, fs.r_part.l3, fs.composed.l3);
      r.measure("N", 16.0);
      r.check("relative-reconstruction-error", worst, "<=", 1e-8);
    };

    t["robin-degree"] = [p](Report& r) {
      const DomainPtr d = unit_disk(p.op);
      const DegreeReport rep = degree_linear(laplace_robin_pair(d, 0.0, 1.0));
      r.measure("degree", rep.degree);
      r.measure("dim_E_minus", rep.dim_E_minus);
      r.measure("eigen_seconds", rep.diagnostics.wall_seconds);
      r.check("degree", rep.degree, "==", 1.0);
      r.check("dim-E-minus", static_cast<double>(rep.dim_E_minus), "==", 0.0);
    };
    return t;
  }

  static std::string format_N(double N) { return std::to_string(static_cast<long long>(N)); }

  Preset preset_;
  std::vector<std::string> checks_;
  int random_samples_;
};

}  // namespace

std::vector<std::string> verify_check_names() {
  return {"resolvent-bound", "rellich-constant", "rellich-cos",  "rellich-refinement", "kernel-estimate",
          "threshold",       "surjectivity",     "semifiniteness", "frozen-split",     "robin-degree"};
}

std::unique_ptr<Command> make_verify_command(const Section& root) { return std::make_unique<VerifyCommand>(root); }

}  // namespace obdeg::cli
