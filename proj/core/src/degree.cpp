#include "obdeg/degree.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

#include "obdeg/dense.hpp"
#include "obdeg/errors.hpp"

namespace obdeg {

namespace {

struct Spectrum {
  std::vector<std::complex<double>> finite;
  std::size_t infinite = 0;
  double scale = 0.0;
};

Spectrum pencil_spectrum(const LinearPair& pair, const EigenOptions& opts) {
  const SparseMatrix A = pair.assemble();
  const auto n = A.rows();
  const auto ni = static_cast<Eigen::Index>(pair.domain->interior_count());
  Eigen::MatrixXd negA = -Eigen::MatrixXd(A);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  M.topLeftCorner(ni, ni).setIdentity();

  Spectrum out;
  out.scale = negA.topRows(ni).cwiseAbs().rowwise().sum().maxCoeff();
  const auto ev = generalized_eigenvalues(std::move(negA), std::move(M));
  for (const auto& e : ev) {
    const double amag = std::hypot(e.alpha_re, e.alpha_im);
    // |lambda| = |alpha| / |beta|; a mass coefficient below infinite_beta
    // relative to alpha / scale puts lambda beyond any finite mode of A.
    if (e.beta == 0.0 || std::abs(e.beta) * std::max(out.scale, 1.0) <= opts.infinite_beta * amag) {
      ++out.infinite;
      continue;
    }
    out.finite.emplace_back(e.alpha_re / e.beta, e.alpha_im / e.beta);
  }
  return out;
}

// Groups coincident negative eigenvalues and compares the algebraic
// multiplicity with the nullity of -A - lambda M.
void check_clusters(const LinearPair& pair, const std::vector<double>& negatives,
                    DegreeDiagnostics& dg) {
  std::size_t k = 0;
  while (k < negatives.size()) {
    std::size_t end = k + 1;
    while (end < negatives.size() &&
           std::abs(negatives[end] - negatives[k]) <= 1e-6 * std::abs(negatives[k]))
      ++end;
    const std::size_t algebraic = end - k;
    if (algebraic > 1) {
      ++dg.negative_clusters;
      double mean = 0.0;
      for (std::size_t q = k; q < end; ++q) mean += negatives[q];
      mean /= static_cast<double>(algebraic);
      const auto ni = static_cast<Eigen::Index>(pair.domain->interior_count());
      Eigen::MatrixXd shifted = -Eigen::MatrixXd(pair.assemble());
      shifted.diagonal().head(ni).array() -= mean;
      const Eigen::VectorXd sv = singular_values(std::move(shifted));
      const double cut = 1.5e-8 * sv[0];
      std::size_t nullity = 0;
      for (Eigen::Index q = 0; q < sv.size(); ++q)
        if (sv[q] <= cut) ++nullity;
      if (nullity < algebraic) dg.defective = true;
    }
    k = end;
  }
}

int parity_sign(std::size_t count) { return count % 2 == 0 ? 1 : -1; }

double sup_distance(const ScalarField& a, const ScalarField& b) {
  return (a.values() - b.values()).lpNorm<Eigen::Infinity>();
}

}  // namespace

std::vector<std::complex<double>> pair_eigenvalues(const LinearPair& pair, const EigenOptions& opts) {
  return pencil_spectrum(pair, opts).finite;
}

DegreeReport negative_eigencount(const LinearPair& pair, const EigenOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Spectrum sp = pencil_spectrum(pair, opts);
  DegreeReport rep;
  auto& dg = rep.diagnostics;
  dg.matrix_size = pair.domain->node_count();
  dg.finite_eigenvalues = sp.finite.size();
  dg.infinite_eigenvalues = sp.infinite;
  dg.matrix_scale = sp.scale;
  dg.nearest_to_zero = std::numeric_limits<double>::infinity();
  if (sp.finite.size() != pair.domain->interior_count()) {
    std::ostringstream os;
    os << "expected " << pair.domain->interior_count() << " finite eigenvalues, found "
       << sp.finite.size() << " (boundary block not invertible?)";
    throw Error(ErrorKind::numerical, os.str());
  }
  for (const auto& lam : sp.finite) {
    const double mag = std::abs(lam);
    dg.nearest_to_zero = std::min(dg.nearest_to_zero, mag);
    if (mag <= opts.degeneracy_tolerance * sp.scale) {
      std::ostringstream os;
      os << "linear pair is degenerate: eigenvalue " << lam.real() << "+" << lam.imag()
         << "i within " << opts.degeneracy_tolerance << " * scale (" << sp.scale << ") of zero";
      throw Error(ErrorKind::degeneracy, os.str());
    }
    if (lam.real() >= 0.0) continue;
    if (std::abs(lam.imag()) <= opts.real_tolerance * mag)
      rep.negative_real_eigenvalues.push_back(lam.real());
    else
      ++dg.complex_negative;
  }
  if (dg.complex_negative % 2 != 0)
    throw Error(ErrorKind::numerical,
                "odd number of complex eigenvalues with negative real part (conjugate pairing broken)");
  std::sort(rep.negative_real_eigenvalues.begin(), rep.negative_real_eigenvalues.end());
  check_clusters(pair, rep.negative_real_eigenvalues, dg);
  rep.dim_E_minus = rep.negative_real_eigenvalues.size();
  rep.degree = parity_sign(rep.dim_E_minus);
  dg.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

DegreeReport degree_linear(const LinearPair& pair, const EigenOptions& opts) {
  return negative_eigencount(pair, opts);
}

DegreeReport degree_at_zero(const ObliqueProblem& prob, const ScalarField& u,
                            const ZeroOptions& opts) {
  const double res = residual(prob, u).sup_norm();
  if (res > opts.residual_tolerance) {
    std::ostringstream os;
    os << "residual sup-norm " << res << " exceeds " << opts.residual_tolerance;
    throw Error(ErrorKind::not_a_zero, os.str());
  }
  return degree_linear(linearize(prob, u), opts.eigen);
}

DegreeReport degree_sum(const ObliqueProblem& prob, const std::vector<ScalarField>& zeros,
                        const ZeroOptions& opts) {
  for (std::size_t i = 0; i < zeros.size(); ++i)
    for (std::size_t j = i + 1; j < zeros.size(); ++j)
      if (sup_distance(zeros[i], zeros[j]) <= opts.distinct_tolerance)
        throw Error(ErrorKind::input, "zeros " + std::to_string(i) + " and " + std::to_string(j) +
                                          " coincide");
  DegreeReport total;
  total.degree = 0;
  for (const ScalarField& z : zeros) {
    const DegreeReport r = degree_at_zero(prob, z, opts);
    total.degree += r.degree;
    total.dim_E_minus += r.dim_E_minus;
    total.negative_real_eigenvalues.insert(total.negative_real_eigenvalues.end(),
                                           r.negative_real_eigenvalues.begin(),
                                           r.negative_real_eigenvalues.end());
    total.diagnostics.matrix_size = r.diagnostics.matrix_size;
    total.diagnostics.wall_seconds += r.diagnostics.wall_seconds;
  }
  return total;
}

ObliqueProblem combine(const LinearPair& pair, const ObliqueProblem& prob2) {
  pair.validate();
  if (pair.domain.get() != prob2.domain().get())
    throw Error(ErrorKind::input, "linear pair and perturbation live on different domains");
  const auto lin = std::make_shared<const LinearPair>(pair);
  const auto p2 = std::make_shared<const ObliqueProblem>(prob2);
  ProblemDefinition def;
  def.name = "combined(" + prob2.name() + ")";
  def.domain = pair.domain;
  def.f = [lin, p2](const NodeInfo& n, double z, const Vec2& p, const Mat2& r) {
    const Mat2& a = lin->a[n.index];
    return (a.array() * r.array()).sum() + lin->d[n.index].dot(p) +
           lin->c[static_cast<Eigen::Index>(n.index)] * z + p2->f(n, z, p, r);
  };
  def.g = [lin, p2](const NodeInfo& n, double z, const Vec2& p) {
    const std::size_t q = n.index - lin->domain->interior_count();
    return lin->b[q].dot(p) + lin->l[static_cast<Eigen::Index>(q)] * z + p2->g(n, z, p);
  };
  def.df = [lin, p2](const NodeInfo& n, double z, const Vec2& p, const Mat2& r) {
    InteriorPartials d = p2->df(n, z, p, r);
    d.d_r += lin->a[n.index];
    d.d_p += lin->d[n.index];
    d.d_z += lin->c[static_cast<Eigen::Index>(n.index)];
    return d;
  };
  def.dg = [lin, p2](const NodeInfo& n, double z, const Vec2& p) {
    const std::size_t q = n.index - lin->domain->interior_count();
    BoundaryPartials d = p2->dg(n, z, p);
    d.d_p += lin->b[q];
    d.d_z += lin->l[static_cast<Eigen::Index>(q)];
    return d;
  };
  return ObliqueProblem(std::move(def));
}

ProductFormulaReport product_formula_check(const LinearPair& pair, const ObliqueProblem& prob2,
                                           const std::vector<ScalarField>& zeros,
                                           const ZeroOptions& opts) {
  ProductFormulaReport rep;
  const ObliqueProblem combined = combine(pair, prob2);
  rep.lhs = degree_sum(combined, zeros, opts).degree;

  const DegreeReport lin = negative_eigencount(pair, opts.eigen);
  rep.dim_E_minus_linear = lin.dim_E_minus;

  Eigen::SparseMatrix<double> A1(pair.assemble());
  A1.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A1);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::degeneracy, "linear pair (F1,G1) is singular");

  int sum = 0;
  for (const ScalarField& u : zeros) {
    const Eigen::MatrixXd J2 = Eigen::MatrixXd(jacobian(prob2, u));
    Eigen::MatrixXd K = lu.solve(J2);
    K.diagonal().array() += 1.0;
    const LuSummary s = lu_summary(std::move(K));
    if (s.det_sign == 0) throw Error(ErrorKind::degeneracy, "I + (F1,G1)^{-1} J2 is singular at a zero");
    rep.det_signs.push_back(s.det_sign);
    sum += s.det_sign;
  }
  rep.rhs = parity_sign(lin.dim_E_minus) * sum;
  rep.equal = rep.lhs == rep.rhs;
  return rep;
}

HomotopyInvarianceReport homotopy_invariance_check(const ProblemFamily& family,
                                                   const std::vector<double>& t_samples,
                                                   const ZeroTracker& tracker,
                                                   const ZeroOptions& opts) {
  HomotopyInvarianceReport rep;
  std::vector<ScalarField> previous;
  for (std::size_t k = 0; k < t_samples.size(); ++k) {
    const double t = t_samples[k];
    if (k > 0 && !(t > t_samples[k - 1]))
      throw Error(ErrorKind::input, "t samples must be strictly increasing");
    const ObliqueProblem prob = family(t);
    std::vector<ScalarField> zeros = tracker(prob, previous);

    HomotopySample s{t, zeros.size(), 0, {}, std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
    const DegreeReport total = degree_sum(prob, zeros, opts);  // validates distinctness too
    for (const ScalarField& z : zeros) {
      const LinearPair lp = linearize(prob, z);
      s.zero_degrees.push_back(degree_linear(lp, opts.eigen).degree);
      s.min_ellipticity = std::min(s.min_ellipticity, ellipticity_margin(lp));
      s.min_obliqueness = std::min(s.min_obliqueness, obliqueness_margin(lp));
    }
    s.degree_sum = total.degree;

    if (!rep.samples.empty()) {
      const HomotopySample& prev = rep.samples.back();
      // Nondegenerate zeros carry degree +-1, so degree_sum and the zero count
      // share parity; a parity jump means the tracker missed a zero.
      const bool parity_broken =
          ((prev.zero_count + s.zero_count) % 2) != 0;
      if (parity_broken) {
        std::ostringstream os;
        os << "zero count changed from " << prev.zero_count << " to " << s.zero_count
           << " between t=" << prev.t << " and t=" << t
           << "; an odd change cannot come from pairwise creation or annihilation";
        throw Error(ErrorKind::incomplete_tracking, os.str());
      }
      if (s.degree_sum != prev.degree_sum && rep.constant) {
        rep.constant = false;
        rep.change_lo = prev.t;
        rep.change_hi = t;
      }
    }
    rep.samples.push_back(std::move(s));
    previous = std::move(zeros);
  }
  return rep;
}

}  // namespace obdeg
