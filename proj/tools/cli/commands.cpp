#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "obdeg/csv.hpp"
#include "obdeg/errors.hpp"
#include "obdeg/reflector.hpp"
#include "obdeg/yamabe.hpp"
#include "verify.hpp"

namespace obdeg::cli {

namespace {

json eigen_echo(const EigenOptions& e) {
  return {{"real_tolerance", e.real_tolerance},
          {"degeneracy_tolerance", e.degeneracy_tolerance},
          {"infinite_beta", e.infinite_beta}};
}

json params_echo(const ParameterMap& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

json degree_json(const DegreeReport& r) {
  return {{"degree", r.degree},
          {"dim_E_minus", r.dim_E_minus},
          {"negative_real_eigenvalues", r.negative_real_eigenvalues},
          {"matrix_size", r.diagnostics.matrix_size},
          {"finite_eigenvalues", r.diagnostics.finite_eigenvalues},
          {"infinite_eigenvalues", r.diagnostics.infinite_eigenvalues},
          {"complex_negative", r.diagnostics.complex_negative},
          {"nearest_to_zero", r.diagnostics.nearest_to_zero},
          {"matrix_scale", r.diagnostics.matrix_scale},
          {"negative_clusters", r.diagnostics.negative_clusters},
          {"defective", r.diagnostics.defective},
          {"eigen_seconds", r.diagnostics.wall_seconds}};
}

std::string path_csv(const SolvePath& path) {
  std::vector<std::vector<double>> rows;
  for (const PathEntry& e : path.entries)
    rows.push_back({e.t, e.residual, e.lambda, e.chi, static_cast<double>(e.iterations)});
  return table_csv({"t", "residual", "lambda", "chi", "iterations"}, rows);
}

ScalarField constant_field(const DomainPtr& d, double c) {
  return ScalarField(d, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d->node_count()), c));
}

struct ProblemSpec {
  std::string name;
  ParameterMap params;
};

ProblemSpec read_problem(const Section& s) {
  ProblemSpec p{s.string("name"), s.parameters("params")};
  s.finish();
  return p;
}

// ---------------------------------------------------------------- degree

class DegreeCommand : public Command {
 public:
  explicit DegreeCommand(const Section& root)
      : domain_(read_domain(root.child("domain"))),
        problem_(read_problem(root.child("problem"))),
        guess_(root.number("initial_constant", 0.0)),
        newton_(read_newton(root.optional_child("newton"))) {
    ZeroOptions z;
    z.eigen = read_eigen(root.optional_child("eigen"));
    zero_ = z;
    if (auto e = root.optional_child("expect")) {
      if (e->has("degree")) expect_degree_ = e->integer("degree");
      if (e->has("dim_E_minus")) expect_dim_ = e->integer("dim_E_minus");
      e->finish();
    }
  }

  json echo() const override {
    json j{{"domain", domain_.echo()},
           {"problem", {{"name", problem_.name}, {"params", params_echo(problem_.params)}}},
           {"initial_constant", guess_},
           {"newton", newton_echo(newton_)},
           {"eigen", eigen_echo(zero_.eigen)}};
    json e = json::object();
    if (expect_degree_) e["degree"] = *expect_degree_;
    if (expect_dim_) e["dim_E_minus"] = *expect_dim_;
    if (!e.empty()) j["expect"] = e;
    return j;
  }

  void run(const RunContext& ctx, Report& report) override {
    const DomainPtr d = domain_.build();
    const ObliqueProblem prob = make_problem(problem_.name, d, problem_.params);
    const NewtonResult nr = newton_solve(prob, constant_field(d, guess_), newton_);
    write_file_atomic(ctx.file(".field.csv"), field_csv(nr.u));
    report.measure("newton_iterations", nr.diagnostics.iterations);
    report.measure("residual", nr.diagnostics.final_residual);
    report.measure("lambda", nr.diagnostics.lambda);
    report.measure("chi", nr.diagnostics.chi);
    report.check("zero-residual", nr.diagnostics.final_residual, "<=", newton_.tolerance);

    ZeroOptions z = zero_;
    z.residual_tolerance = std::max(z.residual_tolerance, newton_.tolerance);
    const DegreeReport rep = degree_at_zero(prob, nr.u, z);
    report.measure("degree", degree_json(rep));
    json eig = json::array();
    for (const auto& l : pair_eigenvalues(linearize(prob, nr.u), zero_.eigen)) eig.push_back({l.real(), l.imag()});
    report.measure("eigenvalues", eig);
    report.check("parity", static_cast<double>(rep.degree), "==", rep.dim_E_minus % 2 == 0 ? 1.0 : -1.0);
    if (expect_degree_) report.check("expected-degree", rep.degree, "==", *expect_degree_);
    if (expect_dim_) report.check("expected-dim-E-minus", static_cast<double>(rep.dim_E_minus), "==", *expect_dim_);
    *ctx.log << "degree " << rep.degree << " (dim E- = " << rep.dim_E_minus << ")\n";
  }

 private:
  DomainSpec domain_;
  ProblemSpec problem_;
  double guess_;
  NewtonOptions newton_;
  ZeroOptions zero_;
  std::optional<int> expect_degree_, expect_dim_;
};

// ---------------------------------------------------------------- solve

class SolveCommand : public Command {
 public:
  explicit SolveCommand(const Section& root)
      : domain_(read_domain(root.child("domain"))),
        problem_(read_problem(root.child("problem"))),
        guess_(root.number("initial_constant", 0.0)),
        newton_(read_newton(root.optional_child("newton"))) {}

  json echo() const override {
    return {{"domain", domain_.echo()},
            {"problem", {{"name", problem_.name}, {"params", params_echo(problem_.params)}}},
            {"initial_constant", guess_},
            {"newton", newton_echo(newton_)}};
  }

  void run(const RunContext& ctx, Report& report) override {
    const DomainPtr d = domain_.build();
    const ObliqueProblem prob = make_problem(problem_.name, d, problem_.params);
    report.measure("derivative_check", {{"states", prob.derivative_check().states_checked},
                                        {"max_relative_error", prob.derivative_check().max_relative_error},
                                        {"fallback", prob.uses_fallback_derivatives()}});
    const NewtonResult nr = newton_solve(prob, constant_field(d, guess_), newton_);
    write_file_atomic(ctx.file(".field.csv"), field_csv(nr.u));
    const auto& dg = nr.diagnostics;
    report.measure("iterations", dg.iterations);
    report.measure("residual_history", dg.residual_history);
    report.measure("damping_history", dg.damping_history);
    report.measure("lambda", dg.lambda);
    report.measure("chi", dg.chi);
    report.check("converged", dg.final_residual, "<=", newton_.tolerance);
    *ctx.log << "solved in " << dg.iterations << " iterations, residual " << dg.final_residual << "\n";
  }

 private:
  DomainSpec domain_;
  ProblemSpec problem_;
  double guess_;
  NewtonOptions newton_;
};

// ---------------------------------------------------------------- homotopy

class HomotopyCommand : public Command {
 public:
  explicit HomotopyCommand(const Section& root)
      : domain_(read_domain(root.child("domain"))),
        family_(read_problem(root.child("family"))),
        guess_(root.number("initial_constant", 0.0)),
        schedule_(read_schedule(root.optional_child("schedule"))),
        write_fields_(root.boolean("write_fields", false)) {
    if (auto inv = root.optional_child("invariance")) {
      samples_ = inv->integer("samples", 11);
      guesses_ = inv->numbers("guesses");
      inv->finish();
      if (samples_ < 2) throw ConfigError("/invariance/samples: need at least 2 samples");
    }
  }

  json echo() const override {
    json j{{"domain", domain_.echo()},
           {"family", {{"name", family_.name}, {"params", params_echo(family_.params)}}},
           {"initial_constant", guess_},
           {"schedule", schedule_echo(schedule_)},
           {"write_fields", write_fields_}};
    if (samples_) j["invariance"] = {{"samples", samples_}, {"guesses", guesses_}};
    return j;
  }

  void run(const RunContext& ctx, Report& report) override {
    const DomainPtr d = domain_.build();
    const ProblemFamily family = make_family(family_.name, d, family_.params);
    const NewtonResult start = newton_solve(family(0.0), constant_field(d, guess_), schedule_.newton);
    SolvePath path;
    try {
      path = continue_homotopy(family, start.u, schedule_);
    } catch (const ContinuationStuckError& e) {
      write_outputs(ctx, e.partial_path());
      report.measure("reached_t", e.partial_path().entries.empty() ? 0.0 : e.partial_path().entries.back().t);
      throw;
    }
    write_outputs(ctx, path);
    report.measure("steps", path.entries.size());
    report.measure("step_halvings", path.step_halvings);
    report.check("reached-t1", path.entries.back().t, ">=", 1.0);
    double worst = 0.0;
    for (const PathEntry& e : path.entries) worst = std::max(worst, e.residual);
    report.check("path-residual", worst, "<=", schedule_.newton.tolerance);

    if (samples_) {
      std::vector<double> ts;
      for (int k = 0; k < samples_; ++k) ts.push_back(static_cast<double>(k) / (samples_ - 1));
      const HomotopyInvarianceReport inv =
          homotopy_invariance_check(family, ts, multistart_tracker(guesses_, schedule_.newton));
      json samples = json::array();
      std::size_t zmin = SIZE_MAX, zmax = 0;
      for (const HomotopySample& s : inv.samples) {
        samples.push_back({{"t", s.t},
                           {"zero_count", s.zero_count},
                           {"degree_sum", s.degree_sum},
                           {"zero_degrees", s.zero_degrees},
                           {"min_ellipticity", s.min_ellipticity},
                           {"min_obliqueness", s.min_obliqueness}});
        zmin = std::min(zmin, s.zero_count);
        zmax = std::max(zmax, s.zero_count);
      }
      report.measure("invariance", samples);
      report.measure("zero_count_range", {zmin, zmax});
      report.check_flag("degree-sum-constant", inv.constant);
      *ctx.log << "degree_sum " << (inv.constant ? "constant" : "changed") << " over " << ts.size()
               << " samples, zero count " << zmin << ".." << zmax << "\n";
    }
    *ctx.log << "reached t = " << path.entries.back().t << " in " << path.entries.size() << " steps\n";
  }

 private:
  void write_outputs(const RunContext& ctx, const SolvePath& path) const {
    write_file_atomic(ctx.file(".path.csv"), path_csv(path));
    if (path.entries.empty()) return;
    write_file_atomic(ctx.file(".field.csv"), field_csv(path.entries.back().u));
    if (write_fields_)
      for (std::size_t k = 0; k < path.entries.size(); ++k)
        write_file_atomic(ctx.file(".step" + std::to_string(k) + ".field.csv"), field_csv(path.entries[k].u));
  }

  DomainSpec domain_;
  ProblemSpec family_;
  double guess_;
  ContinuationSchedule schedule_;
  bool write_fields_;
  int samples_ = 0;
  std::vector<double> guesses_;
};

// ---------------------------------------------------------------- reflector

struct IntensitySpec {
  std::string name = "constant";
  double value = 1.0, base = 1.0, amplitude = 0.0, width = 1.0;
  Vec2 center = Vec2::Zero();

  Intensity build() const {
    if (name == "constant") return Intensity::constant(value);
    return Intensity::gaussian(base, amplitude, center, width);
  }
  json echo() const {
    if (name == "constant") return {{"name", name}, {"value", value}};
    return {{"name", name}, {"base", base}, {"amplitude", amplitude}, {"center", {center.x(), center.y()}},
            {"width", width}};
  }
};

IntensitySpec read_intensity(const Section& s) {
  IntensitySpec i;
  i.name = s.string("name");
  if (i.name == "constant") {
    i.value = s.number("value");
  } else if (i.name == "gaussian") {
    i.base = s.number("base");
    i.amplitude = s.number("amplitude");
    i.center = s.point("center");
    i.width = s.number("width");
  } else {
    throw ConfigError(s.path() + "/name: expected \"constant\" or \"gaussian\", got \"" + i.name + "\"");
  }
  s.finish();
  return i;
}

class ReflectorCommand : public Command {
 public:
  explicit ReflectorCommand(const Section& root)
      : domain_(read_domain(root.child("domain"))),
        reflected_(read_intensity(root.child("reflected"))),
        r0_(root.number("foliation_r0")),
        eps_(root.numbers("eps_schedule", default_eps_schedule())),
        samples_(root.unsigned_integer("pushforward_samples", 100000)),
        bins_(root.integer("pushforward_bins", 8)),
        pushforward_tol_(root.number("pushforward_tolerance", 0.05)) {
    const auto sched = root.optional_child("schedule");
    const bool own_newton = sched && sched->has("newton");
    opts_.schedule = read_schedule(sched);
    if (!own_newton) opts_.schedule.newton = ReflectorOptions{}.schedule.newton;
    opts_.stop_tolerance = root.number("stop_tolerance", opts_.stop_tolerance);
    opts_.mass_tolerance = root.number("mass_tolerance", opts_.mass_tolerance);
    if (auto m = root.optional_child("manufactured")) {
      manufactured_ = true;
      const std::string sol = m->string("solution", "example");
      if (sol != "example") throw ConfigError(m->path() + "/solution: only \"example\" is built in");
      route_ = m->string("route", "analytic");
      if (route_ != "analytic" && route_ != "discrete")
        throw ConfigError(m->path() + "/route: expected \"analytic\" or \"discrete\"");
      m->finish();
    }
    if (auto t = root.optional_child("target_disk")) {
      disk_center_ = t->point("center", Vec2::Zero());
      disk_radius_ = t->number("radius");
      t->finish();
      incident_ = read_intensity(root.child("incident"));
      if (auto u0 = root.optional_child("initial")) {
        initial_.a = u0->number("a", initial_.a);
        initial_.b = u0->number("b", initial_.b);
        u0->finish();
      }
    }
    if (manufactured_ == disk_radius_.has_value())
      throw ConfigError("/: give exactly one of \"manufactured\" and \"target_disk\"");
    if (bins_ < 1) throw ConfigError("/pushforward_bins: must be positive");
  }

  json echo() const override {
    json j{{"domain", domain_.echo()},
           {"reflected", reflected_.echo()},
           {"foliation_r0", r0_},
           {"eps_schedule", eps_},
           {"schedule", schedule_echo(opts_.schedule)},
           {"stop_tolerance", opts_.stop_tolerance},
           {"mass_tolerance", opts_.mass_tolerance},
           {"pushforward_samples", samples_},
           {"pushforward_bins", bins_},
           {"pushforward_tolerance", pushforward_tol_}};
    if (manufactured_) j["manufactured"] = {{"solution", "example"}, {"route", route_}};
    if (disk_radius_) {
      j["target_disk"] = {{"center", {disk_center_.x(), disk_center_.y()}}, {"radius", *disk_radius_}};
      j["incident"] = incident_.echo();
      j["initial"] = {{"a", initial_.a}, {"b", initial_.b}};
    }
    return j;
  }

  void run(const RunContext& ctx, Report& report) override {
    const DomainPtr d = domain_.build();
    const Intensity rho_star = reflected_.build();
    ReflectorProblem prob;
    std::optional<AnalyticField> exact;
    if (manufactured_) {
      exact = example_reflector_solution();
      prob = route_ == "analytic" ? manufacture(d, *exact, rho_star) : manufacture(exact->sample(d), rho_star);
    } else {
      const Intensity incident = incident_.build();
      prob.domain = d;
      prob.target = TargetRegion::disk(disk_center_, *disk_radius_);
      prob.rho = ScalarField::sample(d, incident.value);
      prob.rho_at = incident.value;
      prob.rho_star = rho_star;
      prob.initial = initial_;
    }
    report.measure("initial", {{"a", prob.initial.a}, {"b", prob.initial.b}});
    report.measure("mass_balance", mass_balance(prob));

    const DomainFoliation fol(RadiusFunction::constant(r0_), d->radius(), d->n_r(), d->n_theta());
    const ReflectorResult res = solve_reflector(prob, fol, eps_, opts_);
    const auto& dg = res.diagnostics;
    write_file_atomic(ctx.file(".field.csv"), field_csv(res.u));
    write_file_atomic(ctx.file(".path.csv"), path_csv(dg.homotopy));
    write_image(ctx, res.u, prob);

    report.measure("eps_used", dg.eps_used);
    report.measure("eps_differences", dg.eps_differences);
    report.measure("eps_iterations", dg.eps_iterations);
    report.measure("stopped_early", dg.stopped_early);
    report.measure("u_minus_u0_range", {dg.min_u_minus_u0, dg.max_u_minus_u0});
    report.measure("u_minus_u0_vanishes", dg.u_minus_u0_vanishes);
    report.measure("min_det", dg.min_det);
    report.measure("boundary_defect", dg.final_defect);
    report.measure("lambda", dg.lambda);
    report.measure("chi", dg.chi);
    report.measure("newton_tolerance", dg.newton_tolerance);

    ReflectorProblem last = prob;
    last.eps = dg.eps_used.back();
    report.check("final-residual", ma_residual(res.u, last).lpNorm<Eigen::Infinity>(), "<=", dg.newton_tolerance);
    report.check("min-det", dg.min_det, ">", 0.0);
    if (exact) {
      const double err = (res.u.values() - exact->sample(d).values()).lpNorm<Eigen::Infinity>();
      report.measure("error_vs_manufactured", err);
    }
    const PushforwardReport pf = pushforward_check(res.u, prob, samples_, ctx.seed, bins_);
    report.measure("pushforward", {{"samples", pf.samples},
                                   {"bins", pf.bins},
                                   {"l1_discrepancy", pf.l1_discrepancy},
                                   {"outside_fraction", pf.outside_fraction}});
    report.check("pushforward-l1", pf.l1_discrepancy, "<=", pushforward_tol_);
    *ctx.log << "reflector solved at eps = " << dg.eps_used.back() << ", pushforward L1 " << pf.l1_discrepancy
             << "\n";
  }

 private:
  void write_image(const RunContext& ctx, const ScalarField& u, const ReflectorProblem& prob) const {
    const FieldJet jet = jet_of(u);
    const DiscreteDomain& d = *u.domain();
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < d.node_count(); ++k) {
      const Vec2 x = d.point(k);
      const Vec2 T = reflection_map(x, jet.z[static_cast<Eigen::Index>(k)], jet.p[k]);
      rows.push_back({static_cast<double>(k), x.x(), x.y(), T.x(), T.y(), prob.target.signed_distance(T),
                      d.is_boundary(k) ? 1.0 : 0.0});
    }
    write_file_atomic(ctx.file(".image.csv"),
                      table_csv({"node_index", "x", "y", "tx", "ty", "phi_star", "boundary"}, rows));
  }

  DomainSpec domain_;
  IntensitySpec reflected_;
  double r0_;
  std::vector<double> eps_;
  std::uint64_t samples_;
  int bins_;
  double pushforward_tol_;
  ReflectorOptions opts_;
  bool manufactured_ = false;
  std::string route_ = "analytic";
  Vec2 disk_center_ = Vec2::Zero();
  std::optional<double> disk_radius_;
  IntensitySpec incident_;
  InitialReflector initial_;
};

// ---------------------------------------------------------------- yamabe

class YamabeCommand : public Command {
 public:
  explicit YamabeCommand(const Section& root) {
    cfg_.n = root.integer("n");
    cfg_.c = root.number("c", 0.0);
    cfg_.h_g = root.number("h_g", 1.0);
    const std::string dom = root.string("domain", "ball");
    if (dom != "ball" && dom != "annulus") throw ConfigError("/domain: expected \"ball\" or \"annulus\"");
    cfg_.domain = parse_section_domain(dom);
    cfg_.n_r = root.integer("n_r", cfg_.n_r);
    cfg_.n_theta = root.integer("n_theta", cfg_.n_theta);
    opts_.schedule = read_schedule(root.optional_child("schedule"));
    opts_.compute_degree = root.boolean("compute_degree", true);
    opts_.zero.eigen = read_eigen(root.optional_child("eigen"));
  }

  json echo() const override {
    return {{"n", cfg_.n},
            {"c", cfg_.c},
            {"h_g", cfg_.h_g},
            {"domain", to_string(cfg_.domain)},
            {"n_r", cfg_.n_r},
            {"n_theta", cfg_.n_theta},
            {"compute_degree", opts_.compute_degree},
            {"schedule", schedule_echo(opts_.schedule)},
            {"eigen", eigen_echo(opts_.zero.eigen)}};
  }

  void run(const RunContext& ctx, Report& report) override {
    report.measure("kappa", yamabe_kappa(cfg_.n));
    report.measure("exponents", {{"interior", cfg_.interior_exponent()},
                                 {"boundary", cfg_.boundary_exponent()},
                                 {"conformal", cfg_.conformal_exponent()}});
    report.measure("h_g_convention", "unit sphere boundary has h_g = +1 with respect to the outer normal");
    const YamabeResult res = solve_yamabe(cfg_, opts_);
    write_file_atomic(ctx.file(".field.csv"), field_csv(res.u));
    write_file_atomic(ctx.file(".path.csv"), path_csv(res.path));
    write_profile(ctx, res.u);
    report.measure("initial_constant", res.initial_constant);
    report.measure("residual", res.residual);
    report.measure("newton_tolerance", res.newton_tolerance);
    report.check("converged", res.residual, "<=", res.newton_tolerance);
    if (opts_.compute_degree) {
      report.measure("degree", degree_json(res.degree));
      report.check("unit-degree", std::abs(res.degree.degree), "==", 1.0);
    }
    *ctx.log << "yamabe n = " << cfg_.n << ", c = " << cfg_.c << ": residual " << res.residual;
    if (opts_.compute_degree) *ctx.log << ", degree " << res.degree.degree;
    *ctx.log << "\n";
  }

 private:
  void write_profile(const RunContext& ctx, const ScalarField& u) const {
    const DiscreteDomain& d = *u.domain();
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < d.n_r(); ++i) {
      double lo = INFINITY, hi = -INFINITY, sum = 0.0;
      for (int j = 0; j < d.n_theta(); ++j) {
        const double v = u[d.index(i, j)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
      rows.push_back({d.point(d.index(i, 0)).norm(), sum / d.n_theta(), lo, hi});
    }
    write_file_atomic(ctx.file(".profile.csv"), table_csv({"r", "mean", "min", "max"}, rows));
  }

  YamabeConfig cfg_;
  YamabeOptions opts_;
};

}  // namespace

std::vector<std::string> subcommand_names() { return {"degree", "solve", "homotopy", "reflector", "yamabe", "verify"}; }

std::unique_ptr<Command> read_command(const std::string& subcommand, const Section& root) {
  if (subcommand == "degree") return std::make_unique<DegreeCommand>(root);
  if (subcommand == "solve") return std::make_unique<SolveCommand>(root);
  if (subcommand == "homotopy") return std::make_unique<HomotopyCommand>(root);
  if (subcommand == "reflector") return std::make_unique<ReflectorCommand>(root);
  if (subcommand == "yamabe") return std::make_unique<YamabeCommand>(root);
  if (subcommand == "verify") return make_verify_command(root);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

}  // namespace obdeg::cli
