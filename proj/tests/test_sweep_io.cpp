#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "celdyn/closed_form.hpp"
#include "celdyn/errors.hpp"
#include "celdyn/sweep_io.hpp"

using namespace celdyn;
using doctest::Approx;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void check_identical(const CurveRecord& a, const CurveRecord& b) {
  CHECK(a.preset == b.preset);
  CHECK(a.engine == b.engine);
  CHECK(a.params == b.params);
  CHECK(same_bits(a.t, b.t));
  if (std::isnan(a.dc_minus_sq)) {
    CHECK(std::isnan(b.dc_minus_sq));
    CHECK(std::isnan(b.nbar));
  } else {
    CHECK(same_bits(a.dc_minus_sq, b.dc_minus_sq));
    CHECK(same_bits(a.dc_plus_sq, b.dc_plus_sq));
    CHECK(same_bits(a.nbar, b.nbar));
    CHECK(same_bits(a.u, b.u));
    CHECK(same_bits(a.v, b.v));
    CHECK(same_bits(a.w, b.w));
  }
  CHECK(a.unstable == b.unstable);
  CHECK(a.degenerate == b.degenerate);
  CHECK(a.cutoff_limited == b.cutoff_limited);
}

SweepSpec small_spec() {
  SweepSpec spec = preset("fig6");
  spec.t_grid = default_time_grid(17, 2.0);
  return spec;
}

}  // namespace

TEST_CASE("preset table") {
  const auto names = preset_names();
  REQUIRE(names.size() == 12);
  CHECK(names.front() == "fig1");
  CHECK(names.back() == "fig12");
  for (const auto& name : names) {
    CAPTURE(name);
    const SweepSpec spec = preset(name);
    CHECK(spec.name == name);
    CHECK(spec.values.size() == 3);
    CHECK_FALSE(spec.caption.empty());
    CHECK(spec.observables.size() == 1);
    CHECK_NOTHROW(validate(spec));
  }
  CHECK_THROWS_AS(preset("fig13"), UnknownPreset);
  CHECK_THROWS_AS(preset(""), ValidationError);

  const SweepSpec f1 = preset("fig1");
  CHECK(f1.axis == Axis::A);
  CHECK(f1.base.kappa == 0.5);
  CHECK(f1.base.Omega == 0.5);
  CHECK(f1.t_grid.size() == 512);
  CHECK(f1.t_grid.back() == 5.0);
  CHECK(f1.observables[0] == Observable::dc_minus_sq);

  CHECK(preset("fig6").axis == Axis::theta);
  CHECK(preset("fig10").observables[0] == Observable::nbar);
  CHECK(preset("fig12").t_grid == std::vector<double>{0.85});
}

TEST_CASE("drive follows gamma along a decay-ratio sweep") {
  const SweepSpec spec = preset("fig8");
  REQUIRE(spec.axis == Axis::gamma_ratio);
  REQUIRE(spec.drive_per_gamma.has_value());
  const SystemParams p = point_params(spec, 1.5);
  CHECK(p.Gamma == 1.0);
  CHECK(p.gamma == 1.5);
  CHECK(p.Omega == Approx(*spec.drive_per_gamma * 1.5));
  CHECK(axis_value(Axis::gamma_ratio, p) == 1.5);

  SweepSpec bad = spec;
  bad.axis = Axis::Omega;
  CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("sweep validation") {
  SweepSpec spec = small_spec();
  spec.values.clear();
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);

  spec = small_spec();
  spec.t_grid = {0.0, 1.0, 0.5};
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);

  spec = small_spec();
  spec.values = {-1.0};
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);

  CHECK_THROWS_AS(parse_engine("euler"), ValidationError);
  CHECK(parse_axis("gamma_ratio") == Axis::gamma_ratio);
  CHECK(to_string(Engine::fock_oracle) == "fock_oracle");
}

TEST_CASE("rows are point-major and reproducible") {
  const SweepSpec spec = small_spec();
  const auto serial = run_sweep(spec, 1);
  const auto parallel = run_sweep(spec, 4);
  REQUIRE(serial.size() == spec.values.size() * spec.t_grid.size());
  REQUIRE(parallel.size() == serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    const std::size_t point = i / spec.t_grid.size();
    CHECK(serial[i].params.theta == spec.values[point]);
    CHECK(serial[i].t == spec.t_grid[i % spec.t_grid.size()]);
    check_identical(serial[i], parallel[i]);
  }
}

TEST_CASE("closed form and ODE engines agree on a stable sweep") {
  SweepSpec spec = preset("fig1");
  spec.values = {5.0};
  spec.t_grid = default_time_grid(21, 5.0);
  const auto exact = run_sweep(spec);
  spec.engine = Engine::moment_ode;
  spec.settings.ode_dt = 1e-3;
  const auto ode = run_sweep(spec);
  REQUIRE(exact.size() == ode.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CAPTURE(exact[i].t);
    CHECK(ode[i].ok());
    CHECK(ode[i].t == exact[i].t);
    CHECK(ode[i].dc_minus_sq == Approx(exact[i].dc_minus_sq).epsilon(1e-9));
    CHECK(ode[i].nbar == Approx(exact[i].nbar).epsilon(1e-9));
  }
}

TEST_CASE("single-time presets work with integrating engines") {
  SweepSpec spec = preset("fig12");
  spec.engine = Engine::moment_ode;
  spec.settings.ode_dt = 1e-3;
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.ok());
    CHECK(r.t == 0.85);
    CHECK(r.nbar == Approx(mean_photon_pairs(second_moments(r.params, 0.85))).epsilon(1e-9));
  }
}

TEST_CASE("engine failures become NaN rows") {
  const SystemParams p{10.0, 0.5, 0.5, 1.0, 1.0, 0.0};
  const std::vector<double> grid = {0.0, 1.0, 1000.0};
  const auto rows = evaluate_point(p, grid, Engine::closed_form, {}, "x");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].ok());
  CHECK_FALSE(rows[2].ok());
  CHECK(std::isnan(rows[2].dc_minus_sq));
  CHECK(rows[2].unstable);

  EngineSettings big_step;
  big_step.ode_dt = 1.0;
  const auto ode = evaluate_point(p, grid, Engine::moment_ode, big_step, "x");
  REQUIRE(ode.size() == 3);
  for (const auto& r : ode) {
    CHECK_FALSE(r.ok());
    CHECK(r.error.find("too large") != std::string::npos);
  }
}

TEST_CASE("CSV round trip is bit-identical") {
  auto rows = run_sweep(small_spec());
  rows.push_back(evaluate_point({10.0, 0.5, 0.5, 1.0, 1.0, 0.0}, std::vector<double>{1000.0},
                                Engine::closed_form, {}, "bad")[0]);
  std::stringstream first;
  write_csv(first, rows);
  const auto back = read_csv(first);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) check_identical(rows[i], back[i]);

  std::stringstream second;
  write_csv(second, back);
  CHECK(second.str() == first.str());

  const std::string text = first.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "preset,engine,A,kappa,Omega,gamma,Gamma_,theta,t,dc_minus_sq,dc_plus_sq,nbar,u,v,w,"
        "unstable,degenerate,cutoff_limited");
}

TEST_CASE("JSON round trip is bit-identical") {
  auto rows = run_sweep(small_spec());
  rows.push_back(evaluate_point({10.0, 0.5, 0.5, 1.0, 1.0, 0.0}, std::vector<double>{1000.0},
                                Engine::closed_form, {}, "bad")[0]);
  std::stringstream first;
  write_json(first, rows);
  CHECK(first.str().find("null") != std::string::npos);
  const auto back = read_json(first);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) check_identical(rows[i], back[i]);

  std::stringstream second;
  write_json(second, back);
  CHECK(second.str() == first.str());
}

TEST_CASE("malformed files are rejected") {
  std::stringstream no_header;
  CHECK_THROWS_AS(read_csv(no_header), ValidationError);
  std::stringstream wrong_header("a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(wrong_header), ValidationError);
  std::stringstream not_json("{ nope");
  CHECK_THROWS_AS(read_json(not_json), ValidationError);
  std::stringstream not_array("{\"a\": 1}");
  CHECK_THROWS_AS(read_json(not_array), ValidationError);
}

TEST_CASE("summaries pick the minimum variance") {
  const SweepSpec spec = preset("fig2");
  const auto rows = run_sweep(spec);
  const auto summary = summarize(spec, rows);
  REQUIRE(summary.size() == 3);
  CHECK(summary[0].axis_value == 5.0);
  CHECK(summary[0].min_dc_minus_sq == Approx(0.68323).epsilon(1e-4));
  CHECK(summary[0].t_at_min == Approx(3.611).epsilon(2e-3));
  CHECK_FALSE(summary[0].any_error);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(NAN) == "nan");
}
