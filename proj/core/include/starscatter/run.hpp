#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "starscatter/boundary.hpp"
#include "starscatter/scattering.hpp"

namespace starscatter::cli {

using boundary::BoundaryConditions;
using linalg::ComplexMatrix;

struct BoundarySpec {
  enum class Kind { Preset, ExplicitUnitary, KsPair };
  Kind kind = Kind::Preset;
  std::string preset_name;
  boundary::PresetParams preset_params;
  ComplexMatrix unitary;  // explicit form
  ComplexMatrix ks_a, ks_b;
};

struct OutputSpec {
  enum class Format { Csv, Json };
  Format format = Format::Csv;
  std::string path = "results.csv";
  bool include_m_matrices = false;
};

struct CheckSpec {
  double unitarity_tol = 1e-7;
  bool run_asymptotics = false;
  bool run_bound_states = false;
};

/// Parsed and validated run description. `defaulted` records every field that
/// took its default value so reports can echo an exactly reproducible config.
struct RunConfig {
  std::size_t n = 0;
  BoundarySpec boundary;
  bool boundary_hermitian = false;
  bool potentials_shared = false;
  std::vector<scattering::Potential> potentials;  // one per edge
  scattering::KGrid kgrid;
  OutputSpec outputs;
  CheckSpec checks;
  std::vector<std::string> defaulted;
};

/// Parses a UTF-8 JSON run configuration. Complex numbers are [re, im]
/// pairs. Throws ParseError with line/column on malformed input and
/// ValidationError naming the offending field otherwise. An explicit unitary
/// is checked on load; a ks_pair is checked for rank and hermiticity of A*B^H.
RunConfig parse_config(const std::string& text);

/// Instantiates the boundary conditions described by the config.
BoundaryConditions build_boundary(const RunConfig& config);

struct RunReport {
  std::vector<std::string> config_echo;
  std::vector<std::string> warnings;

  std::size_t total_points = 0;
  std::size_t failed_points = 0;
  std::vector<double> failed_ks;
  double max_defect = 0.0;
  double max_defect_k = 0.0;
  double min_rcond = 0.0;

  bool have_asymptotics = false;
  scattering::DecayReport asymptotics;
  bool asymptotics_ok = false;
  std::string asymptotics_note;

  bool have_bound_states = false;
  std::vector<boundary::BoundState> bound_states;

  int exit_code = 0;
  std::string failure_note;

  double wall_ms = 0.0;  // excluded from the reproducibility guarantee
};

struct RunOutcome {
  std::vector<scattering::ScatteringResult> results;
  RunReport report;
  int exit_code = 0;  // 0 ok, 2 numerical failure, 3 check failure
};

/// Executes the sweep and the enabled checks. Configuration errors are
/// reported by parse_config/build_boundary before this point (exit code 1 in
/// the CLI); here failed k-points give exit 2 and failed checks exit 3.
RunOutcome run(const RunConfig& config);

/// Deterministic result serialisation, 17 significant digits per value.
std::string format_csv(const std::vector<scattering::ScatteringResult>& results, std::size_t n,
                       bool include_m_matrices);
std::string format_json(const std::vector<scattering::ScatteringResult>& results, std::size_t n,
                        bool include_m_matrices);

/// Writes results in the requested format; throws IoError with the path.
void emit(const std::vector<scattering::ScatteringResult>& results, std::size_t n,
          const OutputSpec& outputs);

std::string render_report(const RunReport& report);

}  // namespace starscatter::cli
