#pragma once

#include <string_view>

namespace celdyn {

/// Raw physical inputs. All rates share one user-chosen time unit; the figure
/// presets use gamma = Gamma = 1.
struct SystemParams {
  double A = 0.0;      ///< linear gain coefficient
  double kappa = 0.0;  ///< cavity decay rate
  double Omega = 0.0;  ///< drive amplitude
  double gamma = 1.0;  ///< decay rate of the upper/lower coherence
  double Gamma = 1.0;  ///< atomic spontaneous decay rate
  double theta = 0.0;  ///< phase-fluctuation variance (dimensionless)

  bool operator==(const SystemParams&) const = default;
};

/// Dimensionless groups and phase-averaged master-equation coefficients.
struct ReducedParams {
  double zeta = 0.0;    ///< Omega / gamma
  double zeta_p = 0.0;  ///< Omega / Gamma
  double chi = 1.0;     ///< gamma / Gamma
  double B = 4.0;       ///< (4 + zeta^2)(1 + zeta' zeta)
  double eth = 1.0;     ///< exp(-theta)
  double C = 0.0;       ///< 2(zeta'^2 + chi)
  double D = 0.0;       ///< (2 zeta' + zeta) exp(-theta)
  double E = 0.0;       ///< (2 - zeta' zeta) exp(-theta)
  double L = 0.0;       ///< diffusion weight of <f_a f_a*>
  double M = 0.0;       ///< diffusion weight of <f_b f_a>

  /// zeta'(1 + zeta' zeta), the drive-induced pair-creation weight.
  double pair_weight() const { return zeta_p * (1.0 + zeta_p * zeta); }
};

/// Which gain split to use in the amplitude drift. `as_printed` reproduces
/// the 2(zeta' + chi) form for comparison only; it is inconsistent with the
/// spectral decomposition used by the closed form.
enum class DriftVariant { corrected, as_printed };

/// Linear drift and normal-ordered diffusion of the c-number amplitudes:
///
///   d alpha/dt = -eta_a alpha + xi_a beta* + f_a
///   d beta/dt  = -eta_b beta  + xi_b alpha* + f_b
///
/// with <f_a f_a*> = d_aa delta(t - t') and <f_b f_a> = d_ab delta(t - t').
struct DriftDiffusion {
  double eta_a = 0.0;
  double eta_b = 0.0;
  double xi_a = 0.0;
  double xi_b = 0.0;
  double d_aa = 0.0;  ///< may be negative (normal ordering)
  double d_ab = 0.0;

  /// Trace and determinant of the amplitude decay matrix
  /// [[eta_a, -xi_a], [-xi_b, eta_b]]; they equal mu+ + mu- and mu+ mu-.
  double trace() const { return eta_a + eta_b; }
  double determinant() const { return eta_a * eta_b - xi_a * xi_b; }
  double max_rate() const;
};

/// Throws ValidationError naming the first offending field.
void validate(const SystemParams& p);

ReducedParams derive(const SystemParams& p);

DriftDiffusion drift_diffusion(const ReducedParams& rp, const SystemParams& p,
                               DriftVariant variant = DriftVariant::corrected);

/// Convenience: derive + drift_diffusion.
DriftDiffusion drift_diffusion(const SystemParams& p,
                               DriftVariant variant = DriftVariant::corrected);

std::string_view to_string(DriftVariant v);

}  // namespace celdyn
