#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "starscatter/run.hpp"
#include <fstream>

#include "support.hpp"

using namespace starscatter;
using namespace starscatter::cli;
using test_support::distance;
using linalg::Complex;

namespace {

const char* kKirchhoffConfig = R"({
  "n": 2,
  "boundary": {"preset": "kirchhoff"},
  "potentials": {"all": {"kind": "zero"}},
  "kgrid": {"k_min": 0.1, "k_max": 10, "count": 5, "spacing": "linear"}
})";

}  // namespace

TEST_CASE("parse_config accepts the minimal run description") {
  const RunConfig cfg = parse_config(kKirchhoffConfig);
  CHECK(cfg.n == 2);
  CHECK(cfg.boundary.kind == BoundarySpec::Kind::Preset);
  CHECK(cfg.boundary.preset_name == "kirchhoff");
  CHECK(cfg.boundary_hermitian);
  CHECK(cfg.potentials_shared);
  REQUIRE(cfg.potentials.size() == 2);
  CHECK(cfg.potentials[0].kind() == scattering::Potential::Kind::Zero);
  CHECK(cfg.kgrid.count == 5);

  // Defaults are tracked so the report can echo them.
  for (const char* field : {"outputs.format", "outputs.path", "outputs.include_m_matrices",
                            "checks.unitarity_tol", "checks.run_asymptotics",
                            "checks.run_bound_states"}) {
    CHECK(std::find(cfg.defaulted.begin(), cfg.defaulted.end(), field) != cfg.defaulted.end());
  }
  CHECK(cfg.checks.unitarity_tol == 1e-7);
}

TEST_CASE("parse_config rejects k_min = 0 with the field name") {
  const std::string bad = R"({
    "n": 2,
    "boundary": {"preset": "kirchhoff"},
    "potentials": {"all": {"kind": "zero"}},
    "kgrid": {"k_min": 0, "k_max": 10, "count": 5}
  })";
  try {
    parse_config(bad);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "kgrid.k_min");
    CHECK(std::string(e.what()).find("must be > 0") != std::string::npos);
  }
}

TEST_CASE("parse_config reports malformed JSON with position") {
  try {
    parse_config("{\"n\": 2,\n  \"boundary\": }");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse_config validates an explicit unitary on load") {
  const RunConfig cfg = parse_config(R"({
    "n": 1,
    "boundary": {"unitary": [[[0, 1]]]},
    "potentials": {"all": {"kind": "zero"}},
    "kgrid": {"k_min": 0.1, "k_max": 1, "count": 1},
    "checks": {"run_bound_states": true}
  })");
  CHECK(cfg.boundary.kind == BoundarySpec::Kind::ExplicitUnitary);
  CHECK_FALSE(cfg.boundary_hermitian);
  const auto bc = build_boundary(cfg);
  CHECK(std::abs(bc.unitary()(0, 0) - Complex(0.0, 1.0)) <= 1e-15);

  CHECK_THROWS_AS(parse_config(R"({
    "n": 1,
    "boundary": {"unitary": [[[2, 0]]]},
    "potentials": {"all": {"kind": "zero"}},
    "kgrid": {"k_min": 0.1, "k_max": 1, "count": 1}
  })"),
                  ValidationError);
}

TEST_CASE("parse_config validates ks pairs and per-edge potentials") {
  const RunConfig cfg = parse_config(R"({
    "n": 2,
    "boundary": {"ks_pair": {
      "a": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
      "b": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]
    }},
    "potentials": [
      {"kind": "zero"},
      {"kind": "piecewise_constant", "segments": [[0, 1, -1]]}
    ],
    "kgrid": {"k_min": 0.5, "k_max": 2, "count": 2}
  })");
  CHECK_FALSE(cfg.potentials_shared);
  CHECK(cfg.potentials[1].kind() == scattering::Potential::Kind::PiecewiseConstant);
  // A = I, B = 0 is the Dirichlet pair.
  CHECK(distance(build_boundary(cfg).unitary(),
                 Complex(-1.0, 0.0) * linalg::ComplexMatrix::identity(2)) <= 1e-12);

  CHECK_THROWS_AS(parse_config(R"({
    "n": 2,
    "boundary": {"preset": "kirchhoff", "unitary": [[[1,0],[0,0]],[[0,0],[1,0]]]},
    "potentials": {"all": {"kind": "zero"}},
    "kgrid": {"k_min": 0.5, "k_max": 2, "count": 2}
  })"),
                  ValidationError);

  CHECK_THROWS_AS(parse_config(R"({
    "n": 2,
    "boundary": {"preset": "kirchhoff"},
    "potentials": {"all": {"kind": "zero"}},
    "kgrid": {"k_min": 0.5, "k_max": 2, "count": 2},
    "typo_field": 1
  })"),
                  ValidationError);
}

TEST_CASE("run produces the constant Kirchhoff matrix and exit 0") {
  const RunConfig cfg = parse_config(kKirchhoffConfig);
  const RunOutcome outcome = run(cfg);
  CHECK(outcome.exit_code == 0);
  REQUIRE(outcome.results.size() == 5);
  const auto expected = linalg::ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  for (const auto& r : outcome.results) {
    CHECK(r.status == scattering::PointStatus::Ok);
    CHECK(distance(r.s, expected) <= 1e-10);
    CHECK(r.unitarity_defect <= 1e-10);
  }
  CHECK(outcome.report.failed_points == 0);
  CHECK(outcome.report.max_defect <= 1e-10);
}

TEST_CASE("run on a single Neumann edge returns S = [1]") {
  const RunConfig cfg = parse_config(R"({
    "n": 1,
    "boundary": {"preset": "neumann"},
    "potentials": {"all": {"kind": "zero"}},
    "kgrid": {"k_min": 0.2, "k_max": 5, "count": 4}
  })");
  const RunOutcome outcome = run(cfg);
  CHECK(outcome.exit_code == 0);
  for (const auto& r : outcome.results)
    CHECK(std::abs(r.s(0, 0) - Complex(1.0, 0.0)) <= 1e-12);
}

TEST_CASE("run lists the attractive delta bound state in the report") {
  const RunConfig cfg = parse_config(R"({
    "n": 2,
    "boundary": {"preset": "delta", "alpha": -2.0},
    "potentials": {"all": {"kind": "zero"}},
    "kgrid": {"k_min": 0.1, "k_max": 10, "count": 3},
    "checks": {"run_bound_states": true}
  })");
  const RunOutcome outcome = run(cfg);
  CHECK(outcome.exit_code == 0);
  REQUIRE(outcome.report.have_bound_states);
  REQUIRE(outcome.report.bound_states.size() == 1);
  CHECK(outcome.report.bound_states[0].kappa == doctest::Approx(1.0).epsilon(1e-9));

  const std::string text = render_report(outcome.report);
  CHECK(text.find("kappa = 1") != std::string::npos);
  CHECK(text.find("energy = -1") != std::string::npos);
}

TEST_CASE("an unreachable unitarity tolerance forces exit 3 naming the worst k") {
  RunConfig cfg = parse_config(kKirchhoffConfig);
  cfg.checks.unitarity_tol = 1e-30;
  const RunOutcome outcome = run(cfg);
  CHECK(outcome.exit_code == 3);
  CHECK(outcome.report.failure_note.find("k = ") != std::string::npos);
}

TEST_CASE("format_csv writes the documented header and row shape") {
  scattering::ScatteringResult r;
  r.k = 1.0;
  r.s = linalg::ComplexMatrix::identity(1);
  r.m_plus = 0.5 * linalg::ComplexMatrix::identity(1);
  r.m_minus = 0.5 * linalg::ComplexMatrix::identity(1);
  r.unitarity_defect = 0.0;
  r.m_minus_rcond = 1.0;

  const std::string csv = format_csv({r}, 1, false);
  CHECK(csv == "k,s_00_re,s_00_im,defect,rcond,status\n1,1,0,0,1,ok\n");

  const std::string with_m = format_csv({r}, 1, true);
  CHECK(with_m.find("m_plus_00_re") != std::string::npos);
  CHECK(with_m.find("m_minus_00_im") != std::string::npos);
  CHECK(with_m.find("0.5") != std::string::npos);
}

TEST_CASE("json output round-trips numeric values exactly") {
  const RunConfig cfg = parse_config(kKirchhoffConfig);
  const RunOutcome outcome = run(cfg);
  const std::string text = format_json(outcome.results, cfg.n, true);

  const nlohmann::json parsed = nlohmann::json::parse(text);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == outcome.results.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto& row = parsed[i];
    const auto& r = outcome.results[i];
    CHECK(row.at("k").get<double>() == r.k);
    CHECK(row.at("defect").get<double>() == r.unitarity_defect);
    CHECK(row.at("rcond").get<double>() == r.m_minus_rcond);
    CHECK(row.at("status").get<std::string>() == "ok");
    for (std::size_t a = 0; a < cfg.n; ++a)
      for (std::size_t b = 0; b < cfg.n; ++b) {
        CHECK(row.at("s")[a][b][0].get<double>() == r.s(a, b).real());
        CHECK(row.at("s")[a][b][1].get<double>() == r.s(a, b).imag());
        CHECK(row.at("m_plus")[a][b][0].get<double>() == r.m_plus(a, b).real());
        CHECK(row.at("m_minus")[a][b][1].get<double>() == r.m_minus(a, b).imag());
      }
  }
}

TEST_CASE("repeated runs serialise byte-identically") {
  const RunConfig cfg = parse_config(kKirchhoffConfig);
  const RunOutcome first = run(cfg);
  const RunOutcome second = run(cfg);
  CHECK(format_csv(first.results, cfg.n, true) == format_csv(second.results, cfg.n, true));
  CHECK(format_json(first.results, cfg.n, false) == format_json(second.results, cfg.n, false));

  // Reports agree except for the wall-time line.
  std::string ra = render_report(first.report);
  std::string rb = render_report(second.report);
  const auto strip_wall = [](std::string s) {
    const auto pos = s.find("wall time:");
    return s.substr(0, pos);
  };
  CHECK(strip_wall(ra) == strip_wall(rb));
}

TEST_CASE("the report echoes defaults explicitly") {
  const RunConfig cfg = parse_config(kKirchhoffConfig);
  const RunOutcome outcome = run(cfg);
  const std::string text = render_report(outcome.report);
  CHECK(text.find("spacing = linear") != std::string::npos);
  CHECK(text.find("unitarity_tol = 9.9999999999999995e-08 (default)") != std::string::npos);
  CHECK(text.find("format = csv (default)") != std::string::npos);
  CHECK(text.find("preset:kirchhoff") != std::string::npos);
}

TEST_CASE("emit writes files and fails with the path for bad targets") {
  const RunConfig cfg = parse_config(kKirchhoffConfig);
  const RunOutcome outcome = run(cfg);

  OutputSpec spec;
  spec.format = OutputSpec::Format::Csv;
  spec.path = "/tmp/starscatter_test_emit.csv";
  emit(outcome.results, cfg.n, spec);
  std::ifstream in(spec.path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("k,s_00_re", 0) == 0);

  spec.path = "/nonexistent_dir_xyz/out.csv";
  CHECK_THROWS_WITH_AS(emit(outcome.results, cfg.n, spec), doctest::Contains("io_error"), Error);
}
