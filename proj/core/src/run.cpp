#include "starscatter/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace starscatter::cli {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

[[noreturn]] void parse_error_at(const std::string& text, std::size_t byte,
                                 const std::string& reason) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  throw ParseError(line, col, reason);
}

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      throw ValidationError(path + "." + item.key(), "unknown field");
}

const json& require_field(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ValidationError(path + "." + key, "required field is missing");
  return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "must be a number");
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ValidationError(path, "must be a boolean");
  return v.get<bool>();
}

linalg::Complex as_complex(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ValidationError(path, "complex values are [re, im] pairs");
  return {v[0].get<double>(), v[1].get<double>()};
}

ComplexMatrix as_matrix(const json& v, std::size_t n, const std::string& path) {
  if (!v.is_array() || v.size() != n) throw ValidationError(path, "expected " + std::to_string(n) + " rows");
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() != n)
      throw ValidationError(path, "expected " + std::to_string(n) + " columns per row");
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = as_complex(row[j], path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return m;
}

scattering::Potential parse_potential(const json& v, const std::string& path) {
  if (!v.is_object()) throw ValidationError(path, "potential spec must be an object");
  require_keys(v, path, {"kind", "segments", "x", "q"});
  const json& kind = require_field(v, path, "kind");
  if (!kind.is_string()) throw ValidationError(path + ".kind", "must be a string");
  const std::string name = kind.get<std::string>();

  try {
    if (name == "zero") return scattering::Potential::zero();
    if (name == "piecewise_constant") {
      const json& segs = require_field(v, path, "segments");
      if (!segs.is_array()) throw ValidationError(path + ".segments", "must be an array");
      std::vector<scattering::Potential::Segment> segments;
      for (std::size_t i = 0; i < segs.size(); ++i) {
        const json& s = segs[i];
        const std::string spath = path + ".segments[" + std::to_string(i) + "]";
        if (!s.is_array() || s.size() != 3)
          throw ValidationError(spath, "segments are [x_start, x_end, value] triples");
        segments.push_back({as_number(s[0], spath), as_number(s[1], spath), as_number(s[2], spath)});
      }
      return scattering::Potential::piecewise_constant(std::move(segments));
    }
    if (name == "sampled") {
      const json& xs = require_field(v, path, "x");
      const json& qs = require_field(v, path, "q");
      if (!xs.is_array() || !qs.is_array())
        throw ValidationError(path, "sampled potentials need x and q arrays");
      std::vector<double> x, q;
      for (std::size_t i = 0; i < xs.size(); ++i)
        x.push_back(as_number(xs[i], path + ".x[" + std::to_string(i) + "]"));
      for (std::size_t i = 0; i < qs.size(); ++i)
        q.push_back(as_number(qs[i], path + ".q[" + std::to_string(i) + "]"));
      return scattering::Potential::sampled(std::move(x), std::move(q));
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
  throw ValidationError(path + ".kind", "unknown potential kind '" + name + "'");
}

std::string spacing_name(scattering::KGrid::Spacing s) {
  return s == scattering::KGrid::Spacing::Linear ? "linear" : "log";
}

std::string potential_summary(const scattering::Potential& p) {
  using Kind = scattering::Potential::Kind;
  std::ostringstream os;
  switch (p.kind()) {
    case Kind::Zero:
      os << "zero";
      break;
    case Kind::PiecewiseConstant:
      os << "piecewise_constant{";
      for (std::size_t i = 0; i < p.segments().size(); ++i) {
        const auto& s = p.segments()[i];
        os << (i ? ", " : "") << "[" << fmt9(s.x0) << ", " << fmt9(s.x1) << "] -> "
           << fmt9(s.value);
      }
      os << "}";
      break;
    case Kind::Sampled:
      os << "sampled{" << p.sample_x().size() << " points on [0, " << fmt9(p.support_end())
         << "]}";
      break;
  }
  return os.str();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error_at(text, e.byte, e.what());
  }
  if (!root.is_object()) throw ValidationError("(root)", "config must be a JSON object");
  require_keys(root, "config", {"n", "boundary", "potentials", "kgrid", "outputs", "checks"});

  RunConfig cfg;

  const json& jn = require_field(root, "config", "n");
  if (!jn.is_number_unsigned() || jn.get<std::size_t>() == 0)
    throw ValidationError("n", "must be a positive integer");
  cfg.n = jn.get<std::size_t>();

  // boundary: exactly one of preset / unitary / ks_pair
  const json& jb = require_field(root, "config", "boundary");
  if (!jb.is_object()) throw ValidationError("boundary", "must be an object");
  require_keys(jb, "boundary", {"preset", "alpha", "mask", "unitary", "ks_pair"});
  const int forms = int(jb.contains("preset")) + int(jb.contains("unitary")) + int(jb.contains("ks_pair"));
  if (forms != 1)
    throw ValidationError("boundary", "exactly one of preset, unitary, ks_pair must be given");

  if (jb.contains("preset")) {
    cfg.boundary.kind = BoundarySpec::Kind::Preset;
    if (!jb.at("preset").is_string()) throw ValidationError("boundary.preset", "must be a string");
    cfg.boundary.preset_name = jb.at("preset").get<std::string>();
    if (jb.contains("alpha"))
      cfg.boundary.preset_params.alpha = as_number(jb.at("alpha"), "boundary.alpha");
    if (jb.contains("mask")) {
      const json& mask = jb.at("mask");
      if (!mask.is_array() || mask.size() != cfg.n)
        throw ValidationError("boundary.mask", "must be an array of n booleans");
      std::vector<bool> flags;
      for (std::size_t i = 0; i < mask.size(); ++i)
        flags.push_back(as_bool(mask[i], "boundary.mask[" + std::to_string(i) + "]"));
      cfg.boundary.preset_params.dirichlet = std::move(flags);
    }
  } else if (jb.contains("unitary")) {
    if (jb.contains("alpha") || jb.contains("mask"))
      throw ValidationError("boundary", "alpha/mask only apply to presets");
    cfg.boundary.kind = BoundarySpec::Kind::ExplicitUnitary;
    cfg.boundary.unitary = as_matrix(jb.at("unitary"), cfg.n, "boundary.unitary");
  } else {
    if (jb.contains("alpha") || jb.contains("mask"))
      throw ValidationError("boundary", "alpha/mask only apply to presets");
    cfg.boundary.kind = BoundarySpec::Kind::KsPair;
    const json& jks = jb.at("ks_pair");
    if (!jks.is_object()) throw ValidationError("boundary.ks_pair", "must be an object");
    require_keys(jks, "boundary.ks_pair", {"a", "b"});
    cfg.boundary.ks_a = as_matrix(require_field(jks, "boundary.ks_pair", "a"), cfg.n, "boundary.ks_pair.a");
    cfg.boundary.ks_b = as_matrix(require_field(jks, "boundary.ks_pair", "b"), cfg.n, "boundary.ks_pair.b");
  }

  // Build once now: catches non-unitary matrices, bad ks pairs, bad preset
  // parameters, all mapped to named-field errors.
  try {
    cfg.boundary_hermitian = build_boundary(cfg).is_hermitian();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    const char* field = cfg.boundary.kind == BoundarySpec::Kind::ExplicitUnitary ? "boundary.unitary"
                        : cfg.boundary.kind == BoundarySpec::Kind::KsPair        ? "boundary.ks_pair"
                                                                                 : "boundary.preset";
    throw ValidationError(field, e.what());
  }

  // potentials: shared spec under "all" or one spec per edge
  const json& jp = require_field(root, "config", "potentials");
  if (jp.is_object() && jp.contains("all")) {
    require_keys(jp, "potentials", {"all"});
    cfg.potentials_shared = true;
    const scattering::Potential shared = parse_potential(jp.at("all"), "potentials.all");
    cfg.potentials.assign(cfg.n, shared);
  } else if (jp.is_array()) {
    if (jp.size() != cfg.n)
      throw ValidationError("potentials", "expected " + std::to_string(cfg.n) + " per-edge entries");
    for (std::size_t i = 0; i < jp.size(); ++i)
      cfg.potentials.push_back(parse_potential(jp[i], "potentials[" + std::to_string(i) + "]"));
  } else {
    throw ValidationError("potentials", "must be {\"all\": spec} or an array of per-edge specs");
  }

  // kgrid
  const json& jk = require_field(root, "config", "kgrid");
  if (!jk.is_object()) throw ValidationError("kgrid", "must be an object");
  require_keys(jk, "kgrid", {"k_min", "k_max", "count", "spacing"});
  cfg.kgrid.k_min = as_number(require_field(jk, "kgrid", "k_min"), "kgrid.k_min");
  cfg.kgrid.k_max = as_number(require_field(jk, "kgrid", "k_max"), "kgrid.k_max");
  if (!(cfg.kgrid.k_min > 0.0)) throw ValidationError("kgrid.k_min", "must be > 0");
  if (cfg.kgrid.k_min < 1e-3) throw ValidationError("kgrid.k_min", "must be >= 0.001");
  const json& jcount = require_field(jk, "kgrid", "count");
  if (!jcount.is_number_unsigned() || jcount.get<std::size_t>() == 0)
    throw ValidationError("kgrid.count", "must be a positive integer");
  cfg.kgrid.count = jcount.get<std::size_t>();
  if (cfg.kgrid.count > 1 && !(cfg.kgrid.k_max > cfg.kgrid.k_min))
    throw ValidationError("kgrid.k_max", "must be > k_min");
  if (jk.contains("spacing")) {
    const std::string s = jk.at("spacing").is_string() ? jk.at("spacing").get<std::string>() : "";
    if (s == "linear")
      cfg.kgrid.spacing = scattering::KGrid::Spacing::Linear;
    else if (s == "log")
      cfg.kgrid.spacing = scattering::KGrid::Spacing::Log;
    else
      throw ValidationError("kgrid.spacing", "must be \"linear\" or \"log\"");
  } else {
    cfg.kgrid.spacing = scattering::KGrid::Spacing::Linear;
    cfg.defaulted.push_back("kgrid.spacing");
  }

  // outputs
  if (root.contains("outputs")) {
    const json& jo = root.at("outputs");
    if (!jo.is_object()) throw ValidationError("outputs", "must be an object");
    require_keys(jo, "outputs", {"format", "path", "include_m_matrices"});
    if (jo.contains("format")) {
      const std::string f = jo.at("format").is_string() ? jo.at("format").get<std::string>() : "";
      if (f == "csv")
        cfg.outputs.format = OutputSpec::Format::Csv;
      else if (f == "json")
        cfg.outputs.format = OutputSpec::Format::Json;
      else
        throw ValidationError("outputs.format", "must be \"csv\" or \"json\"");
    } else {
      cfg.defaulted.push_back("outputs.format");
    }
    if (jo.contains("path")) {
      if (!jo.at("path").is_string()) throw ValidationError("outputs.path", "must be a string");
      cfg.outputs.path = jo.at("path").get<std::string>();
    } else {
      cfg.outputs.path = cfg.outputs.format == OutputSpec::Format::Csv ? "results.csv" : "results.json";
      cfg.defaulted.push_back("outputs.path");
    }
    if (jo.contains("include_m_matrices"))
      cfg.outputs.include_m_matrices = as_bool(jo.at("include_m_matrices"), "outputs.include_m_matrices");
    else
      cfg.defaulted.push_back("outputs.include_m_matrices");
  } else {
    cfg.defaulted.insert(cfg.defaulted.end(),
                         {"outputs.format", "outputs.path", "outputs.include_m_matrices"});
  }

  // checks
  if (root.contains("checks")) {
    const json& jc = root.at("checks");
    if (!jc.is_object()) throw ValidationError("checks", "must be an object");
    require_keys(jc, "checks", {"unitarity_tol", "run_asymptotics", "run_bound_states"});
    if (jc.contains("unitarity_tol")) {
      cfg.checks.unitarity_tol = as_number(jc.at("unitarity_tol"), "checks.unitarity_tol");
      if (!(cfg.checks.unitarity_tol > 0.0))
        throw ValidationError("checks.unitarity_tol", "must be > 0");
    } else {
      cfg.defaulted.push_back("checks.unitarity_tol");
    }
    if (jc.contains("run_asymptotics"))
      cfg.checks.run_asymptotics = as_bool(jc.at("run_asymptotics"), "checks.run_asymptotics");
    else
      cfg.defaulted.push_back("checks.run_asymptotics");
    if (jc.contains("run_bound_states"))
      cfg.checks.run_bound_states = as_bool(jc.at("run_bound_states"), "checks.run_bound_states");
    else
      cfg.defaulted.push_back("checks.run_bound_states");
  } else {
    cfg.defaulted.insert(cfg.defaulted.end(),
                         {"checks.unitarity_tol", "checks.run_asymptotics", "checks.run_bound_states"});
  }

  return cfg;
}

BoundaryConditions build_boundary(const RunConfig& config) {
  switch (config.boundary.kind) {
    case BoundarySpec::Kind::Preset:
      return boundary::preset(config.boundary.preset_name, config.n, config.boundary.preset_params);
    case BoundarySpec::Kind::ExplicitUnitary:
      return BoundaryConditions::from_unitary(config.boundary.unitary);
    case BoundarySpec::Kind::KsPair:
      return BoundaryConditions::from_ks_pair(config.boundary.ks_a, config.boundary.ks_b);
  }
  raise(ErrorCode::BadParameter, "build_boundary: unreachable");
}

namespace {

bool is_defaulted(const RunConfig& cfg, const std::string& field) {
  return std::find(cfg.defaulted.begin(), cfg.defaulted.end(), field) != cfg.defaulted.end();
}

std::string default_mark(const RunConfig& cfg, const std::string& field) {
  return is_defaulted(cfg, field) ? " (default)" : "";
}

std::vector<std::string> config_echo_lines(const RunConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back("n = " + std::to_string(cfg.n));

  std::ostringstream b;
  b << "boundary = ";
  switch (cfg.boundary.kind) {
    case BoundarySpec::Kind::Preset:
      b << "preset:" << cfg.boundary.preset_name;
      if (cfg.boundary.preset_params.alpha) b << " alpha=" << fmt17(*cfg.boundary.preset_params.alpha);
      if (cfg.boundary.preset_params.dirichlet) {
        b << " mask=[";
        for (std::size_t i = 0; i < cfg.boundary.preset_params.dirichlet->size(); ++i)
          b << (i ? "," : "") << ((*cfg.boundary.preset_params.dirichlet)[i] ? "true" : "false");
        b << "]";
      }
      break;
    case BoundarySpec::Kind::ExplicitUnitary:
      b << "explicit unitary " << cfg.n << "x" << cfg.n;
      break;
    case BoundarySpec::Kind::KsPair:
      b << "ks_pair " << cfg.n << "x" << cfg.n;
      break;
  }
  b << (cfg.boundary_hermitian ? " [hermitian]" : " [non-hermitian]");
  lines.push_back(b.str());

  if (cfg.potentials_shared) {
    lines.push_back("potentials = all: " + potential_summary(cfg.potentials.front()));
  } else {
    for (std::size_t i = 0; i < cfg.potentials.size(); ++i)
      lines.push_back("potentials[" + std::to_string(i) + "] = " + potential_summary(cfg.potentials[i]));
  }

  lines.push_back("kgrid = { k_min = " + fmt17(cfg.kgrid.k_min) + ", k_max = " + fmt17(cfg.kgrid.k_max) +
                  ", count = " + std::to_string(cfg.kgrid.count) + ", spacing = " +
                  spacing_name(cfg.kgrid.spacing) + default_mark(cfg, "kgrid.spacing") + " }");
  lines.push_back(std::string("outputs = { format = ") +
                  (cfg.outputs.format == OutputSpec::Format::Csv ? "csv" : "json") +
                  default_mark(cfg, "outputs.format") + ", path = " + cfg.outputs.path +
                  default_mark(cfg, "outputs.path") + ", include_m_matrices = " +
                  (cfg.outputs.include_m_matrices ? "true" : "false") +
                  default_mark(cfg, "outputs.include_m_matrices") + " }");
  lines.push_back("checks = { unitarity_tol = " + fmt17(cfg.checks.unitarity_tol) +
                  default_mark(cfg, "checks.unitarity_tol") + ", run_asymptotics = " +
                  (cfg.checks.run_asymptotics ? "true" : "false") +
                  default_mark(cfg, "checks.run_asymptotics") + ", run_bound_states = " +
                  (cfg.checks.run_bound_states ? "true" : "false") +
                  default_mark(cfg, "checks.run_bound_states") + " }");
  return lines;
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  RunOutcome outcome;
  RunReport& report = outcome.report;
  report.config_echo = config_echo_lines(config);

  const BoundaryConditions bc = build_boundary(config);
  const scattering::StarGraph graph = scattering::StarGraph::with_potentials(config.potentials);

  for (std::size_t i = 0; i < graph.potentials.size(); ++i) {
    if (scattering::has_tail_mass_warning(graph.potentials[i])) {
      report.warnings.push_back("potential on edge " + std::to_string(i) +
                                " carries visible moment in the last 10% of its support; "
                                "the compact-support truncation may be inaccurate");
      if (config.potentials_shared) break;
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  outcome.results = scattering_sweep(graph, bc, config.kgrid);
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  report.total_points = outcome.results.size();
  report.min_rcond = std::numeric_limits<double>::infinity();
  for (const auto& r : outcome.results) {
    if (r.status == scattering::PointStatus::Failed) {
      ++report.failed_points;
      report.failed_ks.push_back(r.k);
      continue;
    }
    if (r.unitarity_defect > report.max_defect) {
      report.max_defect = r.unitarity_defect;
      report.max_defect_k = r.k;
    }
    report.min_rcond = std::min(report.min_rcond, r.m_minus_rcond);
  }
  if (!std::isfinite(report.min_rcond)) report.min_rcond = 0.0;

  int exit_code = 0;
  std::string note;
  if (report.failed_points > 0) {
    exit_code = 2;
    note = std::to_string(report.failed_points) + " k-point(s) failed numerically";
  } else if (report.max_defect > config.checks.unitarity_tol) {
    exit_code = 3;
    note = "unitarity defect " + fmt9(report.max_defect) + " at k = " + fmt9(report.max_defect_k) +
           " exceeds tolerance " + fmt9(config.checks.unitarity_tol);
  }

  if (config.checks.run_asymptotics) {
    report.have_asymptotics = true;
    try {
      report.asymptotics = scattering::asymptotic_check(outcome.results, bc);
      report.asymptotics_ok = report.asymptotics.decreasing && report.asymptotics.decay_bounded;
      if (!report.asymptotics_ok && exit_code == 0) {
        exit_code = 3;
        note = "asymptotic decay check failed";
      }
    } catch (const Error& e) {
      report.asymptotics_ok = false;
      report.asymptotics_note = e.what();
      if (exit_code == 0) {
        exit_code = 3;
        note = e.what();
      }
    }
  }

  if (config.checks.run_bound_states) {
    report.have_bound_states = true;
    report.bound_states = boundary::zero_potential_bound_states(bc.unitary(), bc.tolerance());
  }

  report.exit_code = exit_code;
  report.failure_note = note;
  outcome.exit_code = exit_code;
  return outcome;
}

namespace {

void append_matrix_fields_csv(std::ostringstream& os, const ComplexMatrix& m, std::size_t n) {
  const bool missing = m.rows() != n || m.cols() != n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (missing) {
        os << ",nan,nan";
      } else {
        os << "," << fmt17(m(i, j).real()) << "," << fmt17(m(i, j).imag());
      }
    }
}

void append_matrix_json(std::ostringstream& os, const ComplexMatrix& m, std::size_t n) {
  const bool missing = m.rows() != n || m.cols() != n;
  os << "[";
  for (std::size_t i = 0; i < n; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < n; ++j) {
      if (missing)
        os << (j ? ", [null, null]" : "[null, null]");
      else
        os << (j ? ", [" : "[") << fmt17(m(i, j).real()) << ", " << fmt17(m(i, j).imag()) << "]";
    }
    os << "]";
  }
  os << "]";
}

}  // namespace

std::string format_csv(const std::vector<scattering::ScatteringResult>& results, std::size_t n,
                       bool include_m_matrices) {
  std::ostringstream os;
  os << "k";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      os << ",s_" << i << j << "_re,s_" << i << j << "_im";
  os << ",defect,rcond";
  if (include_m_matrices) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        os << ",m_plus_" << i << j << "_re,m_plus_" << i << j << "_im";
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        os << ",m_minus_" << i << j << "_re,m_minus_" << i << j << "_im";
  }
  os << ",status\n";

  for (const auto& r : results) {
    const bool ok = r.status == scattering::PointStatus::Ok;
    os << fmt17(r.k);
    append_matrix_fields_csv(os, ok ? r.s : ComplexMatrix(), n);
    os << "," << (ok ? fmt17(r.unitarity_defect) : "nan");
    os << "," << (ok ? fmt17(r.m_minus_rcond) : "nan");
    if (include_m_matrices) {
      append_matrix_fields_csv(os, ok ? r.m_plus : ComplexMatrix(), n);
      append_matrix_fields_csv(os, ok ? r.m_minus : ComplexMatrix(), n);
    }
    os << "," << (ok ? "ok" : r.error) << "\n";
  }
  return os.str();
}

std::string format_json(const std::vector<scattering::ScatteringResult>& results, std::size_t n,
                        bool include_m_matrices) {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t idx = 0; idx < results.size(); ++idx) {
    const auto& r = results[idx];
    const bool ok = r.status == scattering::PointStatus::Ok;
    os << "  {\"k\": " << fmt17(r.k) << ", \"s\": ";
    append_matrix_json(os, ok ? r.s : ComplexMatrix(), n);
    os << ", \"defect\": " << (ok ? fmt17(r.unitarity_defect) : "null");
    os << ", \"rcond\": " << (ok ? fmt17(r.m_minus_rcond) : "null");
    if (include_m_matrices) {
      os << ", \"m_plus\": ";
      append_matrix_json(os, ok ? r.m_plus : ComplexMatrix(), n);
      os << ", \"m_minus\": ";
      append_matrix_json(os, ok ? r.m_minus : ComplexMatrix(), n);
    }
    os << ", \"status\": \"" << (ok ? "ok" : r.error) << "\"}";
    os << (idx + 1 < results.size() ? ",\n" : "\n");
  }
  os << "]\n";
  return os.str();
}

void emit(const std::vector<scattering::ScatteringResult>& results, std::size_t n,
          const OutputSpec& outputs) {
  if (results.empty()) raise(ErrorCode::BadParameter, "emit: no results to write");
  const std::string body = outputs.format == OutputSpec::Format::Csv
                               ? format_csv(results, n, outputs.include_m_matrices)
                               : format_json(results, n, outputs.include_m_matrices);
  std::ofstream out(outputs.path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "emit: cannot open '" + outputs.path + "' for writing");
  out << body;
  out.flush();
  if (!out) raise(ErrorCode::IoError, "emit: write failed for '" + outputs.path + "'");
}

std::string render_report(const RunReport& report) {
  std::ostringstream os;
  os << "starscatter run report\n";
  os << "config:\n";
  for (const auto& line : report.config_echo) os << "  " << line << "\n";
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";

  os << "results: " << report.total_points << " k-point(s), " << report.failed_points
     << " failed\n";
  if (!report.failed_ks.empty()) {
    os << "failed k:";
    for (double k : report.failed_ks) os << " " << fmt9(k);
    os << "\n";
  }
  os << "max unitarity defect: " << fmt9(report.max_defect) << " at k = "
     << fmt9(report.max_defect_k) << "\n";
  os << "min rcond(M_minus): " << fmt9(report.min_rcond) << "\n";

  if (report.have_asymptotics) {
    os << "asymptotics (|S(k) - U_hat|, checkpoints near 10/100/1000):\n";
    for (const auto& c : report.asymptotics.checkpoints)
      os << "  k = " << fmt9(c.k) << "  defect = " << fmt9(c.defect) << "\n";
    os << "  fitted C = " << fmt9(report.asymptotics.fitted_c) << ", decreasing = "
       << (report.asymptotics.decreasing ? "yes" : "no") << ", bounded by C/k = "
       << (report.asymptotics.decay_bounded ? "yes" : "no") << "\n";
    if (!report.asymptotics_note.empty()) os << "  note: " << report.asymptotics_note << "\n";
  }

  if (report.have_bound_states) {
    os << "zero-potential bound states (from the vertex condition alone):\n";
    if (report.bound_states.empty()) {
      os << "  none\n";
    } else {
      for (const auto& s : report.bound_states)
        os << "  kappa = " << fmt9(s.kappa) << "  energy = " << fmt9(-s.kappa * s.kappa)
           << "  multiplicity = " << s.multiplicity << "\n";
    }
  }

  if (report.exit_code == 0)
    os << "status: ok\n";
  else
    os << "status: FAILED (exit " << report.exit_code << "): " << report.failure_note << "\n";
  os << "wall time: " << fmt9(report.wall_ms) << " ms\n";
  return os.str();
}

}  // namespace starscatter::cli
