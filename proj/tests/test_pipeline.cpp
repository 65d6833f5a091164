#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "catmech/figures.hpp"
#include "catmech/pipeline.hpp"

using namespace catmech;
using Catch::Approx;

namespace {

json paper_config_json() {
  return json{
      {"physical",
       {{"omega_m_hz", 5.25e9},
        {"kappa_c_hz", 846e6},
        {"gamma_m_hz", 13.8e3},
        {"g0_hz", 869e3},
        {"temperature_k", 0.035}}},
      {"schedule",
       {{"tau_rb_s", 30e-9},
        {"tau_wt_s", 0.0},
        {"tau_ps_s", 30e-9},
        {"tau_st_s", 1e-6},
        {"tau_rd_s", 30e-9},
        {"drives",
         {{"couplings_hz",
           {{"g1r", 47.8e6}, {"g1b", 38.253e6}, {"g2r", 2.4e6}, {"g3r", 65e6}}}}}}},
      {"task",
       {{"n", 1},
        {"alphas", {1.2}},
        {"rc_mode", "zero"},
        {"transmissivity", 0.51},
        {"threads", 2}}}};
}

}  // namespace

TEST_CASE("config ingestion") {
  SECTION("round trip of a full config") {
    const RunConfig cfg = parse_config(paper_config_json());
    CHECK(cfg.physical.omega_m == Approx(two_pi * 5.25e9));
    CHECK(cfg.task.n == 1);
    CHECK(cfg.task.transmissivity.value() == 0.51);
    const auto d = derive_state(cfg);
    CHECK(d.nbar_th == Approx(7.48e-4).margin(1e-5));
    CHECK(d.mech_spec.r == Approx(std::atanh(38.253 / 47.8)).epsilon(1e-12));
  }
  SECTION("unknown keys are rejected everywhere") {
    json j = paper_config_json();
    j["physical"]["bogus"] = 1;
    CHECK_THROWS_AS(parse_config(j), config_error);
    j = paper_config_json();
    j["schedule"]["extra"] = 2;
    CHECK_THROWS_AS(parse_config(j), config_error);
    j = paper_config_json();
    j["task"]["typo_key"] = 3;
    CHECK_THROWS_AS(parse_config(j), config_error);
    j = paper_config_json();
    j["surprise"] = 4;
    CHECK_THROWS_AS(parse_config(j), config_error);
  }
  SECTION("exactly one drive spec") {
    json j = paper_config_json();
    j["schedule"]["drives"]["powers_w"] = {{"p1r", 80e-6}, {"p1b", 50e-6}, {"p2r", 0.2e-6}, {"p3r", 150e-6}};
    CHECK_THROWS_AS(parse_config(j), config_error);
    j["schedule"]["drives"].erase("couplings_hz");
    const RunConfig cfg = parse_config(j);  // powers alone are fine
    // default telecom-band cavity frequency kicks in
    CHECK(cfg.physical.omega_c.has_value());
    CHECK(*cfg.physical.omega_c == Approx(two_pi * c_light / 1550e-9));
    const auto d = derive_state(cfg);
    CHECK(d.couplings.g1b / d.couplings.g1r == Approx(std::sqrt(50.0 / 80.0)).epsilon(1e-12));
  }
  SECTION("parity pairing enforced") {
    json j = paper_config_json();
    j["task"]["parity"] = "even";  // n = 1 is odd
    CHECK_THROWS_AS(parse_config(j), config_error);
    j["task"]["parity"] = "odd";
    CHECK_NOTHROW(parse_config(j));
  }
  SECTION("missing required keys") {
    json j = paper_config_json();
    j["physical"].erase("kappa_c_hz");
    CHECK_THROWS_AS(parse_config(j), config_error);
  }
}

TEST_CASE("transmissivity defaults to the schedule-derived weight") {
  json j = paper_config_json();
  j["task"].erase("transmissivity");
  const RunConfig cfg = parse_config(j);
  const auto d = derive_state(cfg);
  const double big_g = adiabatic_rate(two_pi * 2.4e6, two_pi * 846e6);
  CHECK(d.transmissivity == Approx(std::exp(-2.0 * big_g * 30e-9)).epsilon(1e-12));
}

TEST_CASE("full pipeline run and manifest determinism") {
  json j = paper_config_json();
  j["task"]["wigner_points"] = 201;
  j["task"]["grid_scale"] = 1.0;
  const RunConfig cfg = parse_config(j);

  const RunManifest m1 = run_pipeline(cfg, j);
  CHECK(m1.p_r == Approx(0.126163189596).epsilon(1e-9));
  REQUIRE(m1.fidelities.size() == 1);
  CHECK(m1.fidelities[0].f == Approx(0.99000745).margin(1e-5));
  CHECK(m1.n_m == Approx(0.4262).margin(0.002));
  CHECK(m1.leak == Approx(0.0232).margin(2e-4));
  CHECK(m1.n_cr > 0.0);

  SECTION("scalars are bit-identical across thread counts and reruns") {
    RunConfig cfg4 = cfg;
    cfg4.task.numerics.threads = 4;
    const RunManifest m4 = run_pipeline(cfg4, j);
    CHECK(m1.p_r == m4.p_r);
    CHECK(m1.fidelities[0].f == m4.fidelities[0].f);
    CHECK(m1.n_m == m4.n_m);
    CHECK(m1.n_cr == m4.n_cr);

    const RunManifest m_again = run_pipeline(cfg, j);
    CHECK(m1.n_m == m_again.n_m);
    CHECK(m1.n_cr == m_again.n_cr);
  }
}

TEST_CASE("ground-state passthrough pipeline") {
  json j = paper_config_json();
  j["schedule"]["drives"]["couplings_hz"]["g1b"] = 0.0;
  j["task"]["n"] = 0;
  j["task"]["transmissivity"] = 1.0;
  j["task"]["alphas"] = {0.05};
  j["task"]["wigner_points"] = 201;
  const RunConfig cfg = parse_config(j);
  const RunManifest m = run_pipeline(cfg, j);
  CHECK(m.derived.mech_spec.r == 0.0);
  CHECK(m.p_r == Approx(1.0).margin(1e-6));
  CHECK(m.n_m == Approx(0.0).margin(1e-3));
  // tiny even cat is vacuum: unit fidelity
  CHECK(m.fidelities[0].f == Approx(1.0).margin(1e-3));
}

TEST_CASE("run directory artifacts") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "catmech_test_run";
  fs::remove_all(dir);

  json j = paper_config_json();
  j["task"]["wigner_points"] = 121;
  j["task"]["wigner_half_width"] = 6.0;
  const RunConfig cfg = parse_config(j);
  const RunManifest m = run_pipeline(cfg, j, dir.string(), false);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "wigner_heralded.csv"));
  CHECK(fs::exists(dir / "wigner_heralded.csv.meta.json"));
  CHECK(fs::exists(dir / "wigner_readout.csv"));

  SECTION("overwrite refused without force") {
    CHECK_THROWS_AS(run_pipeline(cfg, j, dir.string(), false), config_error);
    CHECK_NOTHROW(run_pipeline(cfg, j, dir.string(), true));
  }
  SECTION("manifest carries the scalars") {
    std::ifstream in(dir / "manifest.json");
    json man;
    in >> man;
    CHECK(man["scalars"]["p_r"].get<double>() == Approx(m.p_r));
    CHECK(man["tool_version"].get<std::string>() == std::string(version));
  }
  SECTION("wigner csv parses and matches the header") {
    std::ifstream in(dir / "wigner_heralded.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "beta_re,beta_im,W");
    std::string line;
    std::getline(in, line);
    CHECK(line.find(',') != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("csv doubles round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / pi, 1e-300, -7.25e17}) {
    const std::string s = detail::fmt_double(v);
    CHECK(std::stod(s) == v);
  }
}
