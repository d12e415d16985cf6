#include "celdyn/closed_form.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "celdyn/errors.hpp"

namespace celdyn {

namespace {

// (1 - exp(-x t)) / x, continuous through x = 0 where it equals t.
cplx relaxation_integral(cplx x, double t) {
  const cplx z = x * t;
  if (std::abs(z) < 1e-3) {
    return t * (1.0 - z / 2.0 * (1.0 - z / 3.0 * (1.0 - z / 4.0 * (1.0 - z / 5.0))));
  }
  return (1.0 - std::exp(-z)) / x;
}

double checked_real(cplx x, const char* name, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(x.real()));
  if (std::abs(x.imag()) > tol) {
    std::ostringstream msg;
    msg << "imaginary residue " << x.imag() << " in " << name << " at t=" << t;
    throw NumericalError(msg.str());
  }
  return x.real();
}

}  // namespace

SpectralDecomposition spectral(const ReducedParams& rp, const SystemParams& p,
                               const SpectralOptions& opts) {
  const double f = rp.pair_weight();
  const double g = rp.zeta_p * rp.zeta_p + rp.chi;
  const double pair_sq = f * f;
  double split_sq = 4.0 * g * g;
  const double dephase_sq = rp.E * rp.E;

  SpectralDecomposition sd;
  sd.discriminant = pair_sq + split_sq - dephase_sq;

  const double scale = pair_sq + split_sq + dephase_sq;
  if (std::abs(sd.discriminant) < opts.degeneracy_tolerance * scale) {
    if (opts.strict) {
      std::ostringstream msg;
      msg << "degenerate spectrum: radicand " << sd.discriminant << " at scale " << scale;
      throw DegenerateSpectrum(msg.str());
    }
    // Shift the split term so p and the radicand stay consistent and
    // p^2 + q+ q- = 1 still holds.
    split_sq += opts.perturbation * scale;
    sd.degenerate = true;
  }

  const double radicand = pair_sq + split_sq - dephase_sq;
  const cplx root = std::sqrt(cplx(radicand, 0.0));
  const double half_gain = p.A / (2.0 * rp.B);

  sd.mu_plus = p.kappa / 2.0 + half_gain * (rp.D + root);
  sd.mu_minus = p.kappa / 2.0 + half_gain * (rp.D - root);
  sd.p = std::sqrt(split_sq) / root;
  sd.q_plus = (-f + rp.E) / root;
  sd.q_minus = (-f - rp.E) / root;
  return sd;
}

Propagators propagators(const SpectralDecomposition& sd, double t) {
  if (t == 0.0) return {1.0, 1.0, 0.0, 0.0};
  const cplx em = std::exp(-sd.mu_minus * t);
  const cplx ep = std::exp(-sd.mu_plus * t);
  Propagators pr;
  pr.F_plus = 0.5 * ((1.0 + sd.p) * em + (1.0 - sd.p) * ep);
  pr.F_minus = 0.5 * ((1.0 - sd.p) * em + (1.0 + sd.p) * ep);
  pr.G_plus = sd.q_plus / 2.0 * (ep - em);
  pr.G_minus = sd.q_minus / 2.0 * (ep - em);
  return pr;
}

ClosedFormSolution::ClosedFormSolution(const SystemParams& p, const SpectralOptions& opts)
    : p_(p), rp_(derive(p)), sd_(spectral(rp_, p_, opts)) {
  const double L = rp_.L;
  const double M = rp_.M;
  const cplx pp = sd_.p;
  const cplx qp = sd_.q_plus;
  const cplx qm = sd_.q_minus;
  const double a4 = p_.A / (4.0 * rp_.B);
  const double a2 = p_.A / (2.0 * rp_.B);
  const double a8 = p_.A / (8.0 * rp_.B);

  // <alpha* alpha>
  u_[0] = a4 * (L * (1.0 - pp) * (1.0 - pp) + M * qp * (1.0 - pp));
  u_[1] = a4 * (L * (1.0 + pp) * (1.0 + pp) - M * qp * (1.0 + pp));
  u_[2] = a2 * (L * (1.0 - pp * pp) + M * qp * pp);

  // <beta* beta>
  v_[0] = a4 * (L * qm * qm + M * qm * (1.0 + pp));
  v_[1] = a4 * (L * qm * qm - M * qm * (1.0 - pp));
  v_[2] = -a2 * (L * qm * qm + M * qm * pp);

  // <alpha beta>
  const cplx mix = 1.0 - pp * pp + qm * qp;
  w_[0] = a8 * (2.0 * L * qm * (1.0 - pp) + M * mix);
  w_[1] = -a8 * (2.0 * L * qm * (1.0 + pp) - M * mix);
  w_[2] = a4 * (2.0 * L * qm * pp + M * (1.0 + pp * pp - qm * qp));
}

double ClosedFormSolution::instability_horizon() const {
  const double re = sd_.mu_minus.real();
  if (re >= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(kMomentGrowthLimit) / (2.0 * -re);
}

MomentState ClosedFormSolution::moments(double t) const {
  if (!(t >= 0.0)) throw ValidationError("t", "must be >= 0");
  MomentState m;
  m.t = t;
  if (t == 0.0) return m;
  if (t > instability_horizon()) {
    std::ostringstream msg;
    msg << "moments diverge: Re(mu-)=" << sd_.mu_minus.real() << " and t=" << t
        << " exceeds the instability horizon " << instability_horizon();
    throw NumericalInstability(msg.str());
  }

  const cplx phi_p = relaxation_integral(2.0 * sd_.mu_plus, t);
  const cplx phi_m = relaxation_integral(2.0 * sd_.mu_minus, t);
  const cplx phi_s = relaxation_integral(sd_.mu_plus + sd_.mu_minus, t);

  m.u = checked_real(u_[0] * phi_p + u_[1] * phi_m + u_[2] * phi_s, "u", t);
  m.v = checked_real(v_[0] * phi_p + v_[1] * phi_m + v_[2] * phi_s, "v", t);
  m.w = checked_real(w_[0] * phi_p + w_[1] * phi_m + w_[2] * phi_s, "w", t);
  return m;
}

MomentState second_moments(const SystemParams& p, double t, const SpectralOptions& opts) {
  return ClosedFormSolution(p, opts).moments(t);
}

QuadratureVariances quadrature_variances(const MomentState& m) {
  const double base = 1.0 + m.u + m.v;
  return {base - 2.0 * m.w, base + 2.0 * m.w};
}

double mean_photon_pairs(const MomentState& m) { return 0.5 * (m.u + m.v); }

}  // namespace celdyn
