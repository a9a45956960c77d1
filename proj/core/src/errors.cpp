#include "obdeg/errors.hpp"

#include <utility>

namespace obdeg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::range: return "range";
    case ErrorKind::solver: return "solver";
    case ErrorKind::evaluation: return "domain-of-definition";
    case ErrorKind::degeneracy: return "degeneracy";
    case ErrorKind::not_a_zero: return "not-a-zero";
    case ErrorKind::input: return "input";
    case ErrorKind::incomplete_tracking: return "incomplete-tracking";
    case ErrorKind::left_admissible_set: return "left-admissible-set";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::continuation_stuck: return "continuation-stuck";
    case ErrorKind::degenerate_reflection: return "degenerate-reflection";
    case ErrorKind::inadmissible_state: return "inadmissible-state";
    case ErrorKind::data: return "data";
    case ErrorKind::positivity: return "positivity";
    case ErrorKind::unsupported_regime: return "unsupported-regime";
    case ErrorKind::threshold_not_found: return "threshold-not-found";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::assembly: return "assembly";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

EvaluationError::EvaluationError(std::size_t node, Eigen::Vector2d x, const std::string& detail)
    : Error(ErrorKind::evaluation,
            "evaluator failed at node " + std::to_string(node) + " (x=" + std::to_string(x.x()) +
                ", y=" + std::to_string(x.y()) + "): " + detail),
      node_(node),
      x_(std::move(x)) {}

InadmissibleStateError::InadmissibleStateError(std::vector<std::size_t> nodes,
                                               const std::string& detail)
    : Error(ErrorKind::inadmissible_state,
            detail + " (" + std::to_string(nodes.size()) + " offending nodes)"),
      nodes_(std::move(nodes)) {}

LeftAdmissibleSetError::LeftAdmissibleSetError(int iterate, double lambda, double chi,
                                               const std::string& detail)
    : Error(ErrorKind::left_admissible_set,
            "iterate " + std::to_string(iterate) + ": " + detail),
      iterate_(iterate),
      lambda_(lambda),
      chi_(chi) {}

ThresholdNotFoundError::ThresholdNotFoundError(std::vector<SingularValueSample> profile,
                                               const std::string& detail)
    : Error(ErrorKind::threshold_not_found, detail), profile_(std::move(profile)) {}

}  // namespace obdeg
