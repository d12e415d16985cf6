#include "celdyn/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "celdyn/closed_form.hpp"
#include "celdyn/errors.hpp"
#include "celdyn/sweep_io.hpp"
#include "celdyn/verify.hpp"

namespace celdyn::cli {

namespace {

namespace fs = std::filesystem;

struct ParamFlags {
  SystemParams p{10.0, 0.5, 0.5, 1.0, 1.0, 0.0};
  CLI::Option* opts[6] = {};

  void add(CLI::App& app) {
    opts[0] = app.add_option("--A", p.A, "linear gain coefficient")->capture_default_str();
    opts[1] = app.add_option("--kappa", p.kappa, "cavity decay rate")->capture_default_str();
    opts[2] = app.add_option("--Omega", p.Omega, "drive amplitude")->capture_default_str();
    opts[3] = app.add_option("--gamma", p.gamma, "coherence decay rate")->capture_default_str();
    opts[4] = app.add_option("--Gamma", p.Gamma, "spontaneous decay rate")->capture_default_str();
    opts[5] = app.add_option("--theta", p.theta, "phase-fluctuation variance")
                  ->capture_default_str();
  }

  /// Copies only the explicitly given flags onto `base`.
  SystemParams override(SystemParams base) const {
    double* targets[] = {&base.A, &base.kappa, &base.Omega, &base.gamma, &base.Gamma, &base.theta};
    const double values[] = {p.A, p.kappa, p.Omega, p.gamma, p.Gamma, p.theta};
    for (int i = 0; i < 6; ++i)
      if (opts[i]->count() > 0) *targets[i] = values[i];
    return base;
  }
};

struct Common {
  std::string format = "csv";
  std::string engine = "closed_form";
  std::string out;
  double ode_dt = 1e-4;
  double fock_dt = 1e-4;
  int cutoff = 12;
  bool verbose = false;

  EngineSettings settings() const {
    EngineSettings s;
    s.ode_dt = ode_dt;
    s.fock_dt = fock_dt;
    s.cutoffs = {cutoff, cutoff};
    return s;
  }
};

fs::path resolve_output(const std::string& requested, const std::string& fallback) {
  fs::path path = requested.empty() ? fs::path(fallback) : fs::path(requested);
  if (path.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0')
      path = fs::path(dir) / path;
  }
  return path;
}

void write_records(std::ostream& os, const std::vector<CurveRecord>& rows,
                   const std::string& format) {
  if (format == "json") {
    write_json(os, rows);
  } else {
    write_csv(os, rows);
  }
}

void write_file(const fs::path& path, const std::vector<CurveRecord>& rows,
                const std::string& format) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("out", "cannot open '" + path.string() + "' for writing");
  write_records(os, rows, format);
}

const CurveRecord* first_failure(const std::vector<CurveRecord>& rows) {
  for (const auto& r : rows)
    if (!r.ok()) return &r;
  return nullptr;
}

std::string format_complex(cplx z) {
  std::string s = format_double(z.real());
  if (z.imag() != 0.0) s += (z.imag() > 0.0 ? "+" : "") + format_double(z.imag()) + "i";
  return s;
}

std::string flag_name(const std::string& field) {
  static const char* flags[] = {"A", "kappa", "Omega", "gamma", "Gamma", "theta", "t"};
  for (const char* f : flags)
    if (field == f) return std::string("--") + f;
  return field;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-mode squeezing and photon-pair dynamics of a coherently pumped "
               "correlated emission laser"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file with the same keys as the flags");

  ParamFlags params;
  params.add(app);
  Common common;
  app.add_option("--format", common.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--engine", common.engine, "closed_form | moment_ode | fock_oracle")
      ->check(CLI::IsMember({"closed_form", "moment_ode", "fock_oracle"}))
      ->capture_default_str();
  app.add_option("--out", common.out, "output file (relative paths honor $CELDYN_OUTPUT_DIR)");
  app.add_option("--ode-dt", common.ode_dt, "moment ODE step")->capture_default_str();
  app.add_option("--fock-dt", common.fock_dt, "Fock oracle step")->capture_default_str();
  app.add_option("--cutoff", common.cutoff, "Fock cutoff per mode")->capture_default_str();
  app.add_flag("-v,--verbose", common.verbose, "extra diagnostics on stderr");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "evaluate one parameter point");
  std::vector<double> times;
  int points = 11;
  double t_max = 5.0;
  evaluate->add_option("--t", times, "evaluation times (overrides --points/--t-max)");
  evaluate->add_option("--points", points, "number of uniform times")->capture_default_str();
  evaluate->add_option("--t-max", t_max, "end of the uniform grid")->capture_default_str();

  // figure
  auto* figure = app.add_subcommand("figure", "write a figure preset");
  std::string figure_name;
  figure->add_option("name", figure_name, "fig1 .. fig12")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter");
  std::string axis = "A";
  std::vector<double> values;
  std::optional<double> drive_per_gamma;
  std::string label = "sweep";
  int sweep_points = 512;
  double sweep_t_max = 5.0;
  sweep->add_option("--axis", axis, "A | kappa | Omega | theta | gamma_ratio")
      ->check(CLI::IsMember({"A", "kappa", "Omega", "theta", "gamma_ratio"}))
      ->capture_default_str();
  sweep->add_option("--values", values, "axis values")->required();
  sweep->add_option("--drive-per-gamma", drive_per_gamma, "hold Omega/gamma fixed");
  sweep->add_option("--label", label, "value of the preset column")->capture_default_str();
  sweep->add_option("--points", sweep_points, "number of uniform times")->capture_default_str();
  sweep->add_option("--t-max", sweep_t_max, "end of the uniform grid")->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "run the cross-oracle and invariant checks");
  std::string level = "fast";
  bool as_printed = false;
  int draws = 10000;
  verify->add_option("level", level, "fast | full")
      ->check(CLI::IsMember({"fast", "full"}))
      ->capture_default_str();
  verify->add_flag("--as-printed-drift", as_printed,
                   "use the 2(zeta'+chi) drift split instead of 2(zeta'^2+chi)");
  verify->add_option("--draws", draws, "random parameter draws")->capture_default_str();

  for (auto* sub : {evaluate, figure, sweep, verify}) sub->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (*evaluate) {
      const SystemParams p = params.p;
      validate(p);
      const std::vector<double> grid = times.empty() ? default_time_grid(points, t_max) : times;
      for (double t : grid)
        if (!(t >= 0.0)) throw ValidationError("t", "times must be >= 0");
      const ClosedFormSolution cf(p);
      const SpectralDecomposition& sd = cf.spectrum();
      const auto rows = evaluate_point(p, grid, parse_engine(common.engine), common.settings(),
                                       "evaluate");
      out << "# mu_plus=" << format_complex(sd.mu_plus)
          << " mu_minus=" << format_complex(sd.mu_minus)
          << " discriminant=" << format_double(sd.discriminant)
          << " unstable=" << int(cf.unstable()) << " degenerate=" << int(cf.degenerate())
          << '\n';
      if (common.verbose) {
        const ReducedParams& rp = cf.reduced();
        const DriftDiffusion dd = drift_diffusion(rp, p);
        err << "zeta=" << format_double(rp.zeta) << " zeta_p=" << format_double(rp.zeta_p)
            << " chi=" << format_double(rp.chi) << " B=" << format_double(rp.B)
            << " L=" << format_double(rp.L) << " M=" << format_double(rp.M) << '\n'
            << "eta_a=" << format_double(dd.eta_a) << " eta_b=" << format_double(dd.eta_b)
            << " xi_a=" << format_double(dd.xi_a) << " xi_b=" << format_double(dd.xi_b)
            << " d_aa=" << format_double(dd.d_aa) << " d_ab=" << format_double(dd.d_ab)
            << " horizon=" << format_double(cf.instability_horizon()) << '\n';
      }
      if (common.out.empty()) {
        write_records(out, rows, common.format);
      } else {
        write_file(resolve_output(common.out, ""), rows, common.format);
      }
      if (const CurveRecord* bad = first_failure(rows)) {
        err << "error: " << bad->error << '\n';
        return kNumericalError;
      }
      return kOk;
    }

    if (*figure) {
      SweepSpec spec = preset(figure_name);
      spec.base = params.override(spec.base);
      spec.engine = parse_engine(common.engine);
      spec.settings = common.settings();
      const auto rows = run_sweep(spec);
      const fs::path path = resolve_output(common.out, figure_name + "." + common.format);
      write_file(path, rows, common.format);
      out << figure_name << ": " << rows.size() << " rows -> " << path.string() << '\n';
      for (const auto& s : summarize(spec, rows)) {
        out << "  " << to_string(spec.axis) << '=' << format_double(s.axis_value)
            << " min_dc_minus_sq=" << format_double(s.min_dc_minus_sq)
            << " t=" << format_double(s.t_at_min)
            << " final_nbar=" << format_double(s.final_nbar)
            << (s.any_error ? " (errors)" : "") << '\n';
      }
      if (const CurveRecord* bad = first_failure(rows)) {
        err << "error: " << bad->error << '\n';
        return kNumericalError;
      }
      return kOk;
    }

    if (*sweep) {
      SweepSpec spec;
      spec.name = label;
      spec.base = params.p;
      spec.axis = parse_axis(axis);
      spec.values = values;
      spec.drive_per_gamma = drive_per_gamma;
      spec.t_grid = default_time_grid(sweep_points, sweep_t_max);
      spec.engine = parse_engine(common.engine);
      spec.settings = common.settings();
      const auto rows = run_sweep(spec);
      if (common.out.empty() || common.out == "-") {
        write_records(out, rows, common.format);
      } else {
        write_file(resolve_output(common.out, ""), rows, common.format);
      }
      if (const CurveRecord* bad = first_failure(rows)) {
        err << "error: " << bad->error << '\n';
        return kNumericalError;
      }
      return kOk;
    }

    if (*verify) {
      VerifyOptions vo;
      vo.level = level == "full" ? VerifyLevel::full : VerifyLevel::fast;
      vo.drift = as_printed ? DriftVariant::as_printed : DriftVariant::corrected;
      vo.random_draws = draws;
      vo.ode_dt = common.ode_dt;
      vo.fock_dt = common.fock_dt;
      vo.fock_cutoff = common.cutoff;
      const VerifyReport report = run_verify(vo);
      report.print(out);
      return report.passed() ? kOk : kVerifyFailed;
    }
  } catch (const ValidationError& e) {
    err << "error: " << flag_name(e.field()) << ": "
        << std::string(e.what()).substr(e.field().size() + 2) << '\n';
    return kValidationError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}

}  // namespace celdyn::cli
