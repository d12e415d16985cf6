#pragma once

#include <complex>

#include "celdyn/params.hpp"

namespace celdyn {

using cplx = std::complex<double>;

/// Eigen-structure of the amplitude drift. Below the radicand zero crossing
/// (discriminant < 0) every field is complex; the observables built from it
/// are still real.
struct SpectralDecomposition {
  cplx mu_plus;
  cplx mu_minus;
  cplx p;
  cplx q_plus;
  cplx q_minus;
  double discriminant = 0.0;  ///< unperturbed radicand
  bool degenerate = false;    ///< radicand was perturbed away from zero

  /// Re(mu-) <= 0: the linearized model is above threshold and moments grow.
  bool unstable() const { return mu_minus.real() <= 0.0; }
};

struct SpectralOptions {
  /// Throw DegenerateSpectrum instead of perturbing.
  bool strict = false;
  /// |radicand| < degeneracy_tolerance * scale counts as degenerate.
  double degeneracy_tolerance = 1e-10;
  /// Degenerate radicands are shifted by perturbation * scale.
  double perturbation = 1e-8;
};

SpectralDecomposition spectral(const ReducedParams& rp, const SystemParams& p,
                               const SpectralOptions& opts = {});

/// Homogeneous propagators: alpha(t) = F+ alpha(0) + G+ beta*(0),
/// beta(t) = F- beta(0) + G- alpha*(0).
struct Propagators {
  cplx F_plus;
  cplx F_minus;
  cplx G_plus;
  cplx G_minus;
};

Propagators propagators(const SpectralDecomposition& sd, double t);

/// The three nonzero second moments for a vacuum-started cavity.
struct MomentState {
  double t = 0.0;
  double u = 0.0;  ///< <alpha* alpha>, mean photon number of mode a
  double v = 0.0;  ///< <beta* beta>, mean photon number of mode b
  double w = 0.0;  ///< <alpha beta>

  bool operator==(const MomentState&) const = default;
};

struct QuadratureVariances {
  double dc_minus_sq = 1.0;
  double dc_plus_sq = 1.0;

  /// Below the two-mode vacuum level in either quadrature.
  bool squeezed() const { return dc_minus_sq < 1.0 || dc_plus_sq < 1.0; }
};

/// Analytic second moments for one parameter point. Construction does all the
/// t-independent work, so evaluating a dense time grid is cheap.
class ClosedFormSolution {
 public:
  explicit ClosedFormSolution(const SystemParams& p, const SpectralOptions& opts = {});

  /// Throws NumericalInstability past the instability horizon and
  /// NumericalError if the imaginary residue of a moment exceeds 1e-9.
  MomentState moments(double t) const;

  const SpectralDecomposition& spectrum() const { return sd_; }
  const ReducedParams& reduced() const { return rp_; }
  const SystemParams& params() const { return p_; }
  bool unstable() const { return sd_.unstable(); }
  bool degenerate() const { return sd_.degenerate; }

  /// Largest t for which moments() returns a value. Infinite when stable.
  double instability_horizon() const;

 private:
  SystemParams p_;
  ReducedParams rp_;
  SpectralDecomposition sd_;
  // Weights of phi(2 mu+, t), phi(2 mu-, t), phi(mu+ + mu-, t) per moment.
  cplx u_[3];
  cplx v_[3];
  cplx w_[3];
};

/// Moments grow like exp(2 |Re mu-| t) above threshold; past this factor they
/// are no longer meaningful in double precision.
inline constexpr double kMomentGrowthLimit = 1e15;

MomentState second_moments(const SystemParams& p, double t,
                           const SpectralOptions& opts = {});

QuadratureVariances quadrature_variances(const MomentState& m);

/// (u + v) / 2. Total intensity is twice this.
double mean_photon_pairs(const MomentState& m);

}  // namespace celdyn
