#include "celdyn/sweep_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <future>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "celdyn/closed_form.hpp"
#include "celdyn/errors.hpp"
#include "celdyn/moment_ode.hpp"

namespace celdyn {

namespace {

constexpr std::array<std::string_view, 18> kColumns = {
    "preset", "engine", "A",         "kappa",      "Omega",      "gamma",
    "Gamma_", "theta",  "t",         "dc_minus_sq", "dc_plus_sq", "nbar",
    "u",      "v",      "w",         "unstable",   "degenerate", "cutoff_limited"};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_double(std::string_view s, std::string_view column) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last)
    throw ValidationError(std::string(column), "cannot parse '" + std::string(s) + "' as a number");
  return x;
}

bool parse_flag(std::string_view s, std::string_view column) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw ValidationError(std::string(column), "expected 0/1, got '" + std::string(s) + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

CurveRecord failed_row(std::string_view label, Engine engine, const SystemParams& p, double t,
                       std::string error) {
  CurveRecord r;
  r.preset = label;
  r.engine = engine;
  r.params = p;
  r.t = t;
  r.dc_minus_sq = r.dc_plus_sq = r.nbar = r.u = r.v = r.w = kNaN;
  r.error = std::move(error);
  return r;
}

void fill_observables(CurveRecord& r, double u, double v, double w) {
  r.u = u;
  r.v = v;
  r.w = w;
  const QuadratureVariances q = quadrature_variances({r.t, u, v, w});
  r.dc_minus_sq = q.dc_minus_sq;
  r.dc_plus_sq = q.dc_plus_sq;
  r.nbar = 0.5 * (u + v);
}

// Integrating engines always start from the vacuum at t = 0; a grid that
// starts later gets 0 prepended and the extra row dropped.
std::vector<double> integration_grid(std::span<const double> t_grid, bool& prepended) {
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  prepended = grid.empty() || grid.front() != 0.0;
  if (prepended) grid.insert(grid.begin(), 0.0);
  return grid;
}

struct Preset {
  std::string_view name;
  Axis axis;
  double A;
  double drive_per_gamma;
  std::vector<double> values;
  std::optional<double> fixed_t;
  Observable observable;
  std::string_view caption;
};

const std::vector<Preset>& preset_table() {
  static const std::vector<Preset> table = [] {
    const std::vector<double> gains = {5.0, 10.0, 15.0};
    const std::vector<double> thetas = {0.0, 0.5, 1.0};
    const std::vector<double> ratios = {1.0, 1.5, 2.0};
    using O = Observable;
    return std::vector<Preset>{
        {"fig1", Axis::A, 10.0, 0.5, gains, {}, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, gamma=Gamma, theta=0, Omega=0.5gamma, varying A"},
        {"fig2", Axis::A, 10.0, 10.0, gains, {}, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, gamma=Gamma, theta=0, Omega=10gamma, varying A"},
        {"fig3", Axis::A, 10.0, 2.5, gains, {}, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, gamma=Gamma, theta=0, Omega=2.5gamma, varying A"},
        {"fig4", Axis::theta, 10.0, 0.5, thetas, {}, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, gamma=Gamma, A=10, Omega=0.5gamma, varying theta"},
        {"fig5", Axis::theta, 10.0, 2.5, thetas, {}, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, gamma=Gamma, A=10, Omega=2.5gamma, varying theta"},
        {"fig6", Axis::theta, 10.0, 10.0, thetas, {}, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, gamma=Gamma, A=10, Omega=10gamma, varying theta"},
        {"fig7", Axis::gamma_ratio, 10.0, 0.5, ratios, {}, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, theta=0, A=10, Omega=0.5gamma, varying gamma/Gamma"},
        {"fig8", Axis::gamma_ratio, 10.0, 10.0, ratios, {}, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, theta=0, A=10, Omega=10gamma, varying gamma/Gamma"},
        {"fig9", Axis::gamma_ratio, 10.0, 10.0, ratios, 0.85, O::dc_minus_sq,
         "dc_minus_sq; kappa=0.5, t=0.85, A=10, Omega=10gamma, varying gamma/Gamma"},
        {"fig10", Axis::A, 10.0, 0.5, gains, {}, O::nbar,
         "nbar; kappa=0.5, gamma=Gamma, theta=0, Omega=0.5gamma, varying A"},
        {"fig11", Axis::theta, 10.0, 10.0, thetas, {}, O::nbar,
         "nbar; kappa=0.5, gamma=Gamma, A=10, Omega=10gamma, varying theta"},
        {"fig12", Axis::gamma_ratio, 10.0, 10.0, ratios, 0.85, O::nbar,
         "nbar; kappa=0.5, t=0.85, A=10, Omega=10gamma, varying gamma/Gamma"},
    };
  }();
  return table;
}

}  // namespace

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::closed_form: return "closed_form";
    case Engine::moment_ode: return "moment_ode";
    case Engine::fock_oracle: return "fock_oracle";
  }
  return "?";
}

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::A: return "A";
    case Axis::kappa: return "kappa";
    case Axis::Omega: return "Omega";
    case Axis::theta: return "theta";
    case Axis::gamma_ratio: return "gamma_ratio";
  }
  return "?";
}

std::string_view to_string(Observable o) {
  switch (o) {
    case Observable::dc_minus_sq: return "dc_minus_sq";
    case Observable::dc_plus_sq: return "dc_plus_sq";
    case Observable::nbar: return "nbar";
    case Observable::u: return "u";
    case Observable::v: return "v";
    case Observable::w: return "w";
  }
  return "?";
}

Engine parse_engine(std::string_view s) {
  for (Engine e : {Engine::closed_form, Engine::moment_ode, Engine::fock_oracle})
    if (to_string(e) == s) return e;
  throw ValidationError("engine", "unknown engine '" + std::string(s) + "'");
}

Axis parse_axis(std::string_view s) {
  for (Axis a : {Axis::A, Axis::kappa, Axis::Omega, Axis::theta, Axis::gamma_ratio})
    if (to_string(a) == s) return a;
  throw ValidationError("axis", "unknown axis '" + std::string(s) + "'");
}

Observable parse_observable(std::string_view s) {
  for (Observable o : {Observable::dc_minus_sq, Observable::dc_plus_sq, Observable::nbar,
                       Observable::u, Observable::v, Observable::w})
    if (to_string(o) == s) return o;
  throw ValidationError("observable", "unknown observable '" + std::string(s) + "'");
}

double CurveRecord::observable(Observable o) const {
  switch (o) {
    case Observable::dc_minus_sq: return dc_minus_sq;
    case Observable::dc_plus_sq: return dc_plus_sq;
    case Observable::nbar: return nbar;
    case Observable::u: return u;
    case Observable::v: return v;
    case Observable::w: return w;
  }
  return kNaN;
}

std::vector<double> default_time_grid(int n, double t_max) {
  if (n < 2) throw ValidationError("points", "need at least 2 time points");
  if (!(t_max > 0.0)) throw ValidationError("t_max", "must be > 0");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[i] = t_max * i / (n - 1);
  return grid;
}

SweepSpec preset(std::string_view name) {
  const auto& table = preset_table();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const Preset& p) { return p.name == name; });
  if (it == table.end()) throw UnknownPreset(std::string(name));

  SweepSpec spec;
  spec.name = it->name;
  spec.base = {it->A, 0.5, it->drive_per_gamma, 1.0, 1.0, 0.0};
  spec.axis = it->axis;
  spec.values = it->values;
  spec.drive_per_gamma = it->drive_per_gamma;
  spec.t_grid = it->fixed_t ? std::vector<double>{*it->fixed_t} : default_time_grid();
  spec.observables = {it->observable};
  spec.values_stated = false;
  spec.caption = it->caption;
  return spec;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : preset_table()) names.emplace_back(p.name);
  return names;
}

SystemParams point_params(const SweepSpec& spec, double value) {
  SystemParams p = spec.base;
  switch (spec.axis) {
    case Axis::A: p.A = value; break;
    case Axis::kappa: p.kappa = value; break;
    case Axis::Omega: p.Omega = value; break;
    case Axis::theta: p.theta = value; break;
    case Axis::gamma_ratio: p.gamma = value * p.Gamma; break;
  }
  if (spec.drive_per_gamma) p.Omega = *spec.drive_per_gamma * p.gamma;
  return p;
}

double axis_value(Axis axis, const SystemParams& p) {
  switch (axis) {
    case Axis::A: return p.A;
    case Axis::kappa: return p.kappa;
    case Axis::Omega: return p.Omega;
    case Axis::theta: return p.theta;
    case Axis::gamma_ratio: return p.gamma / p.Gamma;
  }
  return kNaN;
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw ValidationError("values", "sweep needs at least one value");
  if (spec.axis == Axis::Omega && spec.drive_per_gamma)
    throw ValidationError("axis", "cannot sweep Omega while it is tied to gamma");
  for (double v : spec.values) validate(point_params(spec, v));
  if (spec.t_grid.empty()) throw ValidationError("t_grid", "must not be empty");
  if (spec.t_grid.front() < 0.0) throw ValidationError("t_grid", "times must be >= 0");
  for (std::size_t i = 1; i < spec.t_grid.size(); ++i)
    if (!(spec.t_grid[i] > spec.t_grid[i - 1]))
      throw ValidationError("t_grid", "must be strictly increasing");
}

std::vector<CurveRecord> evaluate_point(const SystemParams& p, std::span<const double> t_grid,
                                        Engine engine, const EngineSettings& settings,
                                        std::string_view label) {
  std::vector<CurveRecord> rows;
  rows.reserve(t_grid.size());

  std::optional<ClosedFormSolution> cf;
  try {
    cf.emplace(p);
  } catch (const Error& e) {
    for (double t : t_grid) rows.push_back(failed_row(label, engine, p, t, e.what()));
    return rows;
  }

  const auto base_row = [&](double t) {
    CurveRecord r;
    r.preset = label;
    r.engine = engine;
    r.params = p;
    r.t = t;
    r.unstable = cf->unstable();
    r.degenerate = cf->degenerate();
    return r;
  };

  switch (engine) {
    case Engine::closed_form:
      for (double t : t_grid) {
        CurveRecord r = base_row(t);
        try {
          const MomentState m = cf->moments(t);
          fill_observables(r, m.u, m.v, m.w);
        } catch (const Error& e) {
          r = failed_row(label, engine, p, t, e.what());
          r.unstable = cf->unstable();
          r.degenerate = cf->degenerate();
        }
        rows.push_back(std::move(r));
      }
      break;

    case Engine::moment_ode:
    case Engine::fock_oracle: {
      bool prepended = false;
      const std::vector<double> grid = integration_grid(t_grid, prepended);
      try {
        if (engine == Engine::moment_ode) {
          const auto traj =
              integrate_moments(drift_diffusion(p, settings.drift), grid, settings.ode_dt);
          for (std::size_t i = prepended ? 1 : 0; i < grid.size(); ++i) {
            CurveRecord r = base_row(grid[i]);
            fill_observables(r, traj.states[i].u, traj.states[i].v, traj.states[i].w);
            rows.push_back(std::move(r));
          }
        } else {
          FockOptions opts;
          opts.cutoffs = settings.cutoffs;
          opts.tail_tolerance = settings.tail_tolerance;
          opts.throw_on_cutoff = false;
          const auto series = evolve(p, grid, settings.fock_dt, opts);
          for (std::size_t i = prepended ? 1 : 0; i < grid.size(); ++i) {
            CurveRecord r = base_row(grid[i]);
            fill_observables(r, series[i].n_a, series[i].n_b, series[i].ab.real());
            r.cutoff_limited = series[i].cutoff_limited;
            rows.push_back(std::move(r));
          }
        }
      } catch (const Error& e) {
        rows.clear();
        for (double t : t_grid) {
          CurveRecord r = failed_row(label, engine, p, t, e.what());
          r.unstable = cf->unstable();
          r.degenerate = cf->degenerate();
          rows.push_back(std::move(r));
        }
      }
      break;
    }
  }
  return rows;
}

std::vector<CurveRecord> run_sweep(const SweepSpec& spec, unsigned threads) {
  validate(spec);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  const auto run_point = [&spec](double value) {
    return evaluate_point(point_params(spec, value), spec.t_grid, spec.engine, spec.settings,
                          spec.name);
  };

  std::vector<std::vector<CurveRecord>> per_point(spec.values.size());
  if (threads == 1 || spec.values.size() == 1) {
    for (std::size_t i = 0; i < spec.values.size(); ++i) per_point[i] = run_point(spec.values[i]);
  } else {
    // Fixed-size batches of async tasks; results land in their own slot so
    // the output order never depends on scheduling.
    for (std::size_t start = 0; start < spec.values.size(); start += threads) {
      const std::size_t stop = std::min<std::size_t>(spec.values.size(), start + threads);
      std::vector<std::future<std::vector<CurveRecord>>> jobs;
      for (std::size_t i = start; i < stop; ++i)
        jobs.push_back(std::async(std::launch::async, run_point, spec.values[i]));
      for (std::size_t i = start; i < stop; ++i) per_point[i] = jobs[i - start].get();
    }
  }

  std::vector<CurveRecord> out;
  out.reserve(spec.values.size() * spec.t_grid.size());
  for (auto& rows : per_point)
    std::move(rows.begin(), rows.end(), std::back_inserter(out));
  return out;
}

std::vector<CurveSummary> summarize(const SweepSpec& spec, std::span<const CurveRecord> records) {
  const std::size_t per_curve = spec.t_grid.size();
  std::vector<CurveSummary> out;
  for (std::size_t start = 0; start + per_curve <= records.size(); start += per_curve) {
    CurveSummary s;
    s.axis_value = axis_value(spec.axis, records[start].params);
    s.min_dc_minus_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < start + per_curve; ++i) {
      const CurveRecord& r = records[i];
      if (!r.ok()) {
        s.any_error = true;
        continue;
      }
      if (r.dc_minus_sq < s.min_dc_minus_sq) {
        s.min_dc_minus_sq = r.dc_minus_sq;
        s.t_at_min = r.t;
      }
    }
    s.final_nbar = records[start + per_curve - 1].nbar;
    out.push_back(s);
  }
  return out;
}

std::span<const std::string_view> csv_columns() { return kColumns; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

void write_csv(std::ostream& os, std::span<const CurveRecord> records) {
  for (std::size_t i = 0; i < kColumns.size(); ++i) os << (i ? "," : "") << kColumns[i];
  os << '\n';
  for (const auto& r : records) {
    os << r.preset << ',' << to_string(r.engine);
    for (double x : {r.params.A, r.params.kappa, r.params.Omega, r.params.gamma, r.params.Gamma,
                     r.params.theta, r.t, r.dc_minus_sq, r.dc_plus_sq, r.nbar, r.u, r.v, r.w})
      os << ',' << format_double(x);
    os << ',' << int(r.unstable) << ',' << int(r.degenerate) << ',' << int(r.cutoff_limited)
       << '\n';
  }
}

std::vector<CurveRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("csv", "missing header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (!std::equal(header.begin(), header.end(), kColumns.begin(), kColumns.end()))
    throw ValidationError("csv", "header does not match the curve schema");

  std::vector<CurveRecord> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != kColumns.size())
      throw ValidationError("csv", "row has " + std::to_string(f.size()) + " fields");
    CurveRecord r;
    r.preset = f[0];
    r.engine = parse_engine(f[1]);
    double* targets[] = {&r.params.A, &r.params.kappa, &r.params.Omega, &r.params.gamma,
                         &r.params.Gamma, &r.params.theta, &r.t, &r.dc_minus_sq,
                         &r.dc_plus_sq, &r.nbar, &r.u, &r.v, &r.w};
    for (std::size_t i = 0; i < std::size(targets); ++i)
      *targets[i] = parse_double(f[i + 2], kColumns[i + 2]);
    r.unstable = parse_flag(f[15], kColumns[15]);
    r.degenerate = parse_flag(f[16], kColumns[16]);
    r.cutoff_limited = parse_flag(f[17], kColumns[17]);
    if (std::isnan(r.dc_minus_sq)) r.error = "failed point";
    out.push_back(std::move(r));
  }
  return out;
}

void write_json(std::ostream& os, std::span<const CurveRecord> records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["preset"] = r.preset;
    o["engine"] = to_string(r.engine);
    o["A"] = r.params.A;
    o["kappa"] = r.params.kappa;
    o["Omega"] = r.params.Omega;
    o["gamma"] = r.params.gamma;
    o["Gamma_"] = r.params.Gamma;
    o["theta"] = r.params.theta;
    o["t"] = r.t;
    o["dc_minus_sq"] = r.dc_minus_sq;
    o["dc_plus_sq"] = r.dc_plus_sq;
    o["nbar"] = r.nbar;
    o["u"] = r.u;
    o["v"] = r.v;
    o["w"] = r.w;
    o["unstable"] = r.unstable;
    o["degenerate"] = r.degenerate;
    o["cutoff_limited"] = r.cutoff_limited;
    arr.push_back(std::move(o));
  }
  os << arr.dump(1) << '\n';
}

std::vector<CurveRecord> read_json(std::istream& is) {
  nlohmann::json arr;
  try {
    is >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("json", e.what());
  }
  if (!arr.is_array()) throw ValidationError("json", "expected an array of records");

  const auto num = [](const nlohmann::json& o, const char* key) {
    const auto& v = o.at(key);
    return v.is_null() ? kNaN : v.get<double>();
  };
  std::vector<CurveRecord> out;
  try {
    for (const auto& o : arr) {
      CurveRecord r;
      r.preset = o.at("preset").get<std::string>();
      r.engine = parse_engine(o.at("engine").get<std::string>());
      r.params = {num(o, "A"), num(o, "kappa"), num(o, "Omega"),
                  num(o, "gamma"), num(o, "Gamma_"), num(o, "theta")};
      r.t = num(o, "t");
      r.dc_minus_sq = num(o, "dc_minus_sq");
      r.dc_plus_sq = num(o, "dc_plus_sq");
      r.nbar = num(o, "nbar");
      r.u = num(o, "u");
      r.v = num(o, "v");
      r.w = num(o, "w");
      r.unstable = o.at("unstable").get<bool>();
      r.degenerate = o.at("degenerate").get<bool>();
      r.cutoff_limited = o.at("cutoff_limited").get<bool>();
      if (std::isnan(r.dc_minus_sq)) r.error = "failed point";
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("json", e.what());
  }
  return out;
}

}  // namespace celdyn
