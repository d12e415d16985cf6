#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "celdyn/fock_oracle.hpp"
#include "celdyn/params.hpp"

namespace celdyn {

enum class Engine { closed_form, moment_ode, fock_oracle };

/// Swept parameter. `gamma_ratio` sets gamma = value * Gamma.
enum class Axis { A, kappa, Omega, theta, gamma_ratio };

enum class Observable { dc_minus_sq, dc_plus_sq, nbar, u, v, w };

std::string_view to_string(Engine e);
std::string_view to_string(Axis a);
std::string_view to_string(Observable o);
Engine parse_engine(std::string_view s);
Axis parse_axis(std::string_view s);
Observable parse_observable(std::string_view s);

struct EngineSettings {
  double ode_dt = 1e-4;
  double fock_dt = 1e-4;
  FockCutoffs cutoffs;
  double tail_tolerance = 1e-6;
  DriftVariant drift = DriftVariant::corrected;
};

struct SweepSpec {
  std::string name;
  SystemParams base;
  Axis axis = Axis::A;
  std::vector<double> values;
  /// When set, Omega = drive_per_gamma * gamma at every point, so the drive
  /// follows gamma along a gamma_ratio sweep.
  std::optional<double> drive_per_gamma;
  std::vector<double> t_grid;
  std::vector<Observable> observables;
  Engine engine = Engine::closed_form;
  EngineSettings settings;
  /// False when the swept values are representative defaults rather than
  /// values stated with the figure.
  bool values_stated = false;
  std::string caption;
};

struct CurveRecord {
  std::string preset;
  Engine engine = Engine::closed_form;
  SystemParams params;
  double t = 0.0;
  double dc_minus_sq = 1.0;
  double dc_plus_sq = 1.0;
  double nbar = 0.0;
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  bool unstable = false;
  bool degenerate = false;
  bool cutoff_limited = false;
  /// Empty on success. Not serialized; failed rows carry NaN observables.
  std::string error;

  bool ok() const { return error.empty(); }
  double observable(Observable o) const;
};

/// n uniform points on [0, t_max].
std::vector<double> default_time_grid(int n = 512, double t_max = 5.0);

/// "fig1" .. "fig12". Throws UnknownPreset.
SweepSpec preset(std::string_view name);
std::vector<std::string> preset_names();

/// Parameters of the sweep point for one axis value.
SystemParams point_params(const SweepSpec& spec, double value);
double axis_value(Axis axis, const SystemParams& p);

/// Checks the SweepSpec invariants; throws ValidationError.
void validate(const SweepSpec& spec);

/// Point-major, time-minor rows. Engine failures are attached to the affected
/// rows instead of aborting. threads = 0 uses the hardware concurrency.
std::vector<CurveRecord> run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// Rows for a single parameter point.
std::vector<CurveRecord> evaluate_point(const SystemParams& p, std::span<const double> t_grid,
                                        Engine engine, const EngineSettings& settings = {},
                                        std::string_view label = "");

struct CurveSummary {
  double axis_value = 0.0;
  double min_dc_minus_sq = 0.0;
  double t_at_min = 0.0;
  double final_nbar = 0.0;
  bool any_error = false;
};

std::vector<CurveSummary> summarize(const SweepSpec& spec, std::span<const CurveRecord> records);

/// Column order of the CSV file and keys of the JSON objects.
std::span<const std::string_view> csv_columns();

void write_csv(std::ostream& os, std::span<const CurveRecord> records);
std::vector<CurveRecord> read_csv(std::istream& is);
void write_json(std::ostream& os, std::span<const CurveRecord> records);
std::vector<CurveRecord> read_json(std::istream& is);

/// %.17g formatting without locale; parses back to the same double.
std::string format_double(double x);

}  // namespace celdyn
