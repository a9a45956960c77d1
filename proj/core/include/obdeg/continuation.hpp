#pragma once

#include <string>
#include <vector>

#include "obdeg/degree.hpp"
#include "obdeg/errors.hpp"
#include "obdeg/problem.hpp"

namespace obdeg {

struct NewtonOptions {
  double tolerance = 1e-10;   // sup-norm of the residual, residual units
  int max_iterations = 40;
  double damping_min = 1.0 / 256.0;  // damping factors range over [damping_min, 1]
  double lambda_min = 0.0;    // ellipticity floor
  double chi_min = 0.0;       // obliqueness floor
  double norm_cap = 1e12;     // iterates with larger sup-norm are rejected

  void validate() const;
};

struct NewtonDiagnostics {
  int iterations = 0;
  double final_residual = 0.0;
  double lambda = 0.0;  // ellipticity margin at the returned field
  double chi = 0.0;     // obliqueness margin at the returned field
  std::vector<double> residual_history;  // sup-norms, starting at u0
  std::vector<double> damping_history;
};

struct NewtonResult {
  ScalarField u;
  NewtonDiagnostics diagnostics;
};

NewtonResult newton_solve(const ObliqueProblem& prob, const ScalarField& u0,
                          const NewtonOptions& opts = {});

struct PathEntry {
  double t;
  ScalarField u;
  int iterations;
  double residual;
  double lambda;
  double chi;
};

struct SolvePath {
  std::vector<PathEntry> entries;
  int step_halvings = 0;
};

struct ContinuationSchedule {
  double dt_initial = 0.1;
  double dt_min = 1e-4;
  double dt_max = 0.25;
  bool secant_predictor = true;
  NewtonOptions newton;
};

class ContinuationStuckError : public Error {
 public:
  ContinuationStuckError(SolvePath partial, double t_failed, const std::string& cause);
  const SolvePath& partial_path() const noexcept { return partial_; }
  double failed_at() const noexcept { return t_failed_; }

 private:
  SolvePath partial_;
  double t_failed_;
};

// Tracks the zero of family(t) from t = 0 to t = 1 starting at u0. Fields are
// carried node-wise between slices (all family members share mesh topology).
SolvePath continue_homotopy(const ProblemFamily& family, const ScalarField& u0,
                            const ContinuationSchedule& schedule = {});

// Zero tracker for homotopy_invariance_check: continues every previous zero
// by Newton and adds zeros found from constant initial guesses.
ZeroTracker multistart_tracker(std::vector<double> constant_guesses, NewtonOptions opts = {},
                               double distinct_tolerance = 1e-4);

}  // namespace obdeg
