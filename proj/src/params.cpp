#include "celdyn/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "celdyn/errors.hpp"

namespace celdyn {

namespace {

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void require_finite(const char* field, double x) {
  if (!std::isfinite(x)) throw ValidationError(field, "must be finite");
}

void require_non_negative(const char* field, double x) {
  require_finite(field, x);
  if (x < 0.0) throw ValidationError(field, "must be >= 0, got " + shortest(x));
}

void require_positive(const char* field, double x) {
  require_finite(field, x);
  if (x <= 0.0) throw ValidationError(field, "must be > 0, got " + shortest(x));
}

}  // namespace

double DriftDiffusion::max_rate() const {
  return std::max({std::abs(eta_a), std::abs(eta_b), std::abs(xi_a), std::abs(xi_b)});
}

void validate(const SystemParams& p) {
  require_non_negative("A", p.A);
  require_non_negative("kappa", p.kappa);
  require_non_negative("Omega", p.Omega);
  require_positive("gamma", p.gamma);
  require_positive("Gamma", p.Gamma);
  require_non_negative("theta", p.theta);
}

ReducedParams derive(const SystemParams& p) {
  validate(p);
  ReducedParams r;
  r.zeta = p.Omega / p.gamma;
  r.zeta_p = p.Omega / p.Gamma;
  r.chi = p.gamma / p.Gamma;
  r.B = (4.0 + r.zeta * r.zeta) * (1.0 + r.zeta_p * r.zeta);
  r.eth = std::exp(-p.theta);
  r.C = 2.0 * (r.zeta_p * r.zeta_p + r.chi);
  r.D = (2.0 * r.zeta_p + r.zeta) * r.eth;
  r.E = (2.0 - r.zeta_p * r.zeta) * r.eth;
  r.L = r.C - r.D;
  r.M = r.pair_weight() + r.E;
  return r;
}

DriftDiffusion drift_diffusion(const ReducedParams& rp, const SystemParams& p,
                               DriftVariant variant) {
  // The as-printed split uses zeta' where the rest of the model has zeta'^2.
  const double split = variant == DriftVariant::corrected
                           ? 2.0 * (rp.zeta_p * rp.zeta_p + rp.chi)
                           : 2.0 * (rp.zeta_p + rp.chi);
  const double two_b = 2.0 * rp.B;
  const double f = rp.pair_weight();

  DriftDiffusion dd;
  dd.eta_a = (rp.B * p.kappa + p.A * (rp.D - split)) / two_b;
  dd.eta_b = (rp.B * p.kappa + p.A * (rp.D + split)) / two_b;
  dd.xi_a = p.A * (f - rp.E) / two_b;
  dd.xi_b = p.A * (f + rp.E) / two_b;
  dd.d_aa = p.A / rp.B * rp.L;
  dd.d_ab = p.A / two_b * rp.M;
  return dd;
}

DriftDiffusion drift_diffusion(const SystemParams& p, DriftVariant variant) {
  return drift_diffusion(derive(p), p, variant);
}

std::string_view to_string(DriftVariant v) {
  return v == DriftVariant::corrected ? "corrected" : "as_printed";
}

}  // namespace celdyn
