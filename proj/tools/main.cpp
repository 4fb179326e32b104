#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "starscatter/run.hpp"

namespace {

using namespace starscatter;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void print_matrix(const linalg::ComplexMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::cout << "    [";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto v = m(i, j);
      std::cout << (j ? ", " : "") << "(" << v.real() << (v.imag() < 0 ? " - " : " + ")
                << std::abs(v.imag()) << "i)";
    }
    std::cout << "]\n";
  }
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& format_override, bool quiet) {
  cli::RunConfig config;
  try {
    config = cli::parse_config(read_file(config_path));
    if (!format_override.empty()) {
      config.outputs.format = format_override == "json" ? cli::OutputSpec::Format::Json
                                                        : cli::OutputSpec::Format::Csv;
    }
    if (!out_override.empty()) config.outputs.path = out_override;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    cli::RunOutcome outcome = cli::run(config);
    cli::emit(outcome.results, config.n, config.outputs);
    if (!quiet) std::cout << cli::render_report(outcome.report);
    if (outcome.exit_code != 0)
      std::cerr << "run failed (exit " << outcome.exit_code << "): "
                << outcome.report.failure_note << "\n";
    return outcome.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_check(const std::string& config_path) {
  try {
    const cli::RunConfig config = cli::parse_config(read_file(config_path));
    cli::build_boundary(config);
    std::cout << "config ok: n = " << config.n << ", " << config.kgrid.count << " k-point(s)\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_presets() {
  const std::size_t n = 3;
  std::cout << "available presets (U shown for n = " << n << "):\n\n";
  for (const std::string& name : boundary::preset_names()) {
    boundary::PresetParams params;
    std::string note;
    if (name == "delta") {
      params.alpha = 1.0;
      note = " (alpha = 1; sum of derivatives = alpha * psi(0), continuity across edges)";
    } else if (name == "mixed") {
      params.dirichlet = std::vector<bool>{true, false, false};
      note = " (mask = [true, false, false]; true = Dirichlet edge)";
    }
    const auto bc = boundary::preset(name, n, params);
    std::cout << "  " << name << note << (bc.is_hermitian() ? " [hermitian]" : " [non-hermitian]")
              << "\n";
    print_matrix(bc.unitary());
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star-graph scattering driver: self-adjoint vertex conditions from a unitary "
               "matrix, Jost integration per edge, S(k) with unitarity and asymptotic checks"};
  app.require_subcommand(1);

  std::string config_path, out_override, format_override;
  bool quiet = false;

  CLI::App* run_cmd = app.add_subcommand("run", "execute a run configuration");
  run_cmd->add_option("--config", config_path, "path to a JSON run configuration")->required();
  run_cmd->add_option("--out", out_override, "override the output path");
  run_cmd->add_option("--format", format_override, "override the output format")
      ->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_flag("--quiet", quiet, "suppress the report on stdout");

  CLI::App* check_cmd = app.add_subcommand("check", "validate a configuration without running");
  check_cmd->add_option("--config", config_path, "path to a JSON run configuration")->required();

  CLI::App* presets_cmd = app.add_subcommand("presets", "list boundary-condition presets");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return cmd_run(config_path, out_override, format_override, quiet);
  if (check_cmd->parsed()) return cmd_check(config_path);
  if (presets_cmd->parsed()) return cmd_presets();
  return 1;
}
