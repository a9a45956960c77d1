#include "obdeg/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

namespace obdeg {

namespace {

struct Trial {
  bool ok = false;
  ScalarField u;
  SplitField r;
  std::string why;
};

Trial try_point(const ObliqueProblem& prob, const ScalarField& u, const NewtonOptions& opts) {
  Trial t;
  if (!u.values().allFinite() || u.values().lpNorm<Eigen::Infinity>() > opts.norm_cap) {
    t.why = "iterate exceeded the norm cap";
    return t;
  }
  try {
    t.r = residual(prob, u);
  } catch (const EvaluationError& e) {
    t.why = e.what();
    return t;
  }
  t.u = u;
  t.ok = true;
  return t;
}

}  // namespace

void NewtonOptions::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::configuration, "Newton tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorKind::configuration, "Newton needs at least one iteration");
  if (!(damping_min > 0.0 && damping_min <= 1.0))
    throw Error(ErrorKind::configuration, "damping_min must lie in (0, 1]");
  if (lambda_min < 0.0 || chi_min < 0.0)
    throw Error(ErrorKind::configuration, "margin floors must be nonnegative");
}

NewtonResult newton_solve(const ObliqueProblem& prob, const ScalarField& u0,
                          const NewtonOptions& opts) {
  opts.validate();
  if (u0.domain().get() != prob.domain().get())
    throw Error(ErrorKind::input, "initial field lives on a different domain");

  NewtonResult out{u0, {}};
  auto& dg = out.diagnostics;
  ScalarField u = u0;
  SplitField r = residual(prob, u);
  double r_sup = r.sup_norm();
  dg.residual_history.push_back(r_sup);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool pattern_ready = false;

  for (int it = 0;; ++it) {
    const LinearPair lp = linearize(prob, u);
    dg.lambda = ellipticity_margin(lp);
    dg.chi = obliqueness_margin(lp);
    if (dg.lambda < opts.lambda_min || dg.chi < opts.chi_min) {
      std::ostringstream os;
      os << "margins fell below floors (lambda=" << dg.lambda << " vs " << opts.lambda_min
         << ", chi=" << dg.chi << " vs " << opts.chi_min << ")";
      throw LeftAdmissibleSetError(it, dg.lambda, dg.chi, os.str());
    }
    if (r_sup <= opts.tolerance) {
      dg.iterations = it;
      dg.final_residual = r_sup;
      out.u = u;
      return out;
    }
    if (it >= opts.max_iterations) {
      std::ostringstream os;
      os << "no convergence after " << it << " iterations (residual " << r_sup << ")";
      throw Error(ErrorKind::non_convergence, os.str());
    }

    Eigen::SparseMatrix<double> J(lp.assemble());
    J.makeCompressed();
    if (!pattern_ready) {
      lu.analyzePattern(J);
      pattern_ready = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw Error(ErrorKind::solver, "singular Jacobian at Newton iterate " + std::to_string(it));
    const Eigen::VectorXd step = lu.solve(-r.stacked());
    if (!step.allFinite())
      throw Error(ErrorKind::solver, "non-finite Newton step at iterate " + std::to_string(it));

    const double r_l2 = r.stacked().norm();
    double damping = 1.0;
    std::string last_failure;
    bool accepted = false;
    while (damping >= opts.damping_min) {
      ScalarField cand(u.domain(), u.values() + damping * step);
      Trial t = try_point(prob, cand, opts);
      if (t.ok && t.r.stacked().norm() < (1.0 - 1e-4 * damping) * r_l2) {
        u = std::move(t.u);
        r = std::move(t.r);
        accepted = true;
        break;
      }
      last_failure = t.ok ? "residual did not decrease" : t.why;
      damping *= 0.5;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "line search failed at iterate " << it << " (" << last_failure << ")";
      throw Error(ErrorKind::non_convergence, os.str());
    }
    r_sup = r.sup_norm();
    dg.residual_history.push_back(r_sup);
    dg.damping_history.push_back(damping);
  }
}

ContinuationStuckError::ContinuationStuckError(SolvePath partial, double t_failed,
                                               const std::string& cause)
    : Error(ErrorKind::continuation_stuck,
            "step floor reached at t=" + std::to_string(t_failed) + ": " + cause),
      partial_(std::move(partial)),
      t_failed_(t_failed) {}

SolvePath continue_homotopy(const ProblemFamily& family, const ScalarField& u0,
                            const ContinuationSchedule& schedule) {
  if (!(schedule.dt_min > 0.0 && schedule.dt_initial >= schedule.dt_min &&
        schedule.dt_max >= schedule.dt_initial))
    throw Error(ErrorKind::configuration, "continuation step sizes must satisfy 0 < dt_min <= dt_initial <= dt_max");
  SolvePath path;
  {
    const ObliqueProblem p0 = family(0.0);
    const ScalarField start(p0.domain(), u0.values());
    const double r0 = residual(p0, start).sup_norm();
    if (r0 > schedule.newton.tolerance * 1e3 && r0 > 1e-6) {
      std::ostringstream os;
      os << "initial field does not solve the t=0 problem (residual " << r0 << ")";
      throw Error(ErrorKind::not_a_zero, os.str());
    }
    const NewtonResult nr = newton_solve(p0, start, schedule.newton);
    path.entries.push_back({0.0, nr.u, nr.diagnostics.iterations, nr.diagnostics.final_residual,
                            nr.diagnostics.lambda, nr.diagnostics.chi});
  }

  double dt = schedule.dt_initial;
  while (path.entries.back().t < 1.0) {
    const PathEntry& cur = path.entries.back();
    const double t_next = std::min(1.0, cur.t + dt);
    Eigen::VectorXd guess = cur.u.values();
    if (schedule.secant_predictor && path.entries.size() >= 2) {
      const PathEntry& prev = path.entries[path.entries.size() - 2];
      guess += (cur.u.values() - prev.u.values()) * ((t_next - cur.t) / (cur.t - prev.t));
    }
    std::string cause;
    try {
      const ObliqueProblem p = family(t_next);
      const NewtonResult nr = newton_solve(p, ScalarField(p.domain(), guess), schedule.newton);
      path.entries.push_back({t_next, nr.u, nr.diagnostics.iterations,
                              nr.diagnostics.final_residual, nr.diagnostics.lambda,
                              nr.diagnostics.chi});
      if (nr.diagnostics.iterations <= 4) dt = std::min(schedule.dt_max, 1.5 * dt);
      continue;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::configuration || e.kind() == ErrorKind::input) throw;
      cause = e.what();
    }
    dt *= 0.5;
    ++path.step_halvings;
    if (dt < schedule.dt_min) throw ContinuationStuckError(std::move(path), t_next, cause);
  }
  return path;
}

ZeroTracker multistart_tracker(std::vector<double> constant_guesses, NewtonOptions opts,
                               double distinct_tolerance) {
  return [guesses = std::move(constant_guesses), opts, distinct_tolerance](
             const ObliqueProblem& prob, const std::vector<ScalarField>& previous) {
    std::vector<ScalarField> zeros;
    auto consider = [&](const Eigen::VectorXd& start) {
      try {
        NewtonResult nr = newton_solve(prob, ScalarField(prob.domain(), start), opts);
        for (const ScalarField& z : zeros)
          if ((z.values() - nr.u.values()).lpNorm<Eigen::Infinity>() <= distinct_tolerance) return;
        zeros.push_back(std::move(nr.u));
      } catch (const Error&) {
        // A start that does not converge contributes nothing.
      }
    };
    for (const ScalarField& z : previous) consider(z.values());
    const auto n = static_cast<Eigen::Index>(prob.domain()->node_count());
    for (double c : guesses) consider(Eigen::VectorXd::Constant(n, c));
    return zeros;
  };
}

}  // namespace obdeg
