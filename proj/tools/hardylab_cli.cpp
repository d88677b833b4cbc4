#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hardylab/errors.hpp"
#include "hardylab/format.hpp"
#include "hardylab/grammar.hpp"
#include "hardylab/hardy.hpp"
#include "hardylab/kedlaya.hpp"
#include "hardylab/means.hpp"
#include "hardylab/properties.hpp"
#include "hardylab/rho.hpp"
#include "hardylab/serialize.hpp"

namespace {

using hardylab::ordered_json;
using hardylab::shortest_double;

enum class Format { Plain, Json, Csv };

std::string format_name(Format f) {
  switch (f) {
    case Format::Json: return "json";
    case Format::Csv: return "csv";
    default: return "plain";
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') {
      quoted += "\"\"";
    } else {
      quoted += c;
    }
  }
  quoted += '"';
  return quoted;
}

std::string json_scalar_text(const ordered_json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

// The resolved-config echo: the leading line of plain and CSV output, the
// "config" object of JSON output.
std::string config_line(const ordered_json& config) {
  std::string line = "# config:";
  for (auto it = config.begin(); it != config.end(); ++it) {
    line += ' ';
    line += it.key();
    line += '=';
    line += json_scalar_text(it.value());
  }
  return line;
}

void emit_json(const std::string& command, const ordered_json& config, ordered_json report) {
  ordered_json doc;
  doc["command"] = command;
  doc["config"] = config;
  doc["report"] = std::move(report);
  std::cout << doc.dump(2) << "\n";
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct CommonFlags {
  std::uint64_t seed = 2026;
  bool json = false;
  bool csv = false;

  Format format() const {
    if (json) return Format::Json;
    if (csv) return Format::Csv;
    return Format::Plain;
  }
};

// ---------------------------------------------------------------- mean eval

struct MeanEvalArgs {
  std::string expr;
  std::vector<double> x;
  std::vector<double> w;
};

int run_mean_eval(const MeanEvalArgs& a, const CommonFlags& common) {
  const hardylab::MeanExpr e = hardylab::parse_mean(a.expr);
  double value = 0.0;
  if (a.w.empty()) {
    value = hardylab::eval_mean(e, a.x);
  } else {
    if (a.w.size() != a.x.size()) {
      throw hardylab::DomainError("--w must have as many entries as --x");
    }
    std::vector<hardylab::SampleEntry> entries;
    entries.reserve(a.x.size());
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      entries.push_back({a.x[i], a.w[i]});
    }
    value = hardylab::eval_mean(e, hardylab::WeightedSample(std::move(entries)));
  }

  ordered_json config;
  config["expr"] = a.expr;
  config["x"] = a.x;
  if (!a.w.empty()) {
    config["w"] = a.w;
  }
  config["seed"] = common.seed;
  config["format"] = format_name(common.format());

  switch (common.format()) {
    case Format::Json: {
      ordered_json report;
      report["value"] = hardylab::json_number(value);
      emit_json("mean eval", config, std::move(report));
      break;
    }
    case Format::Csv:
      std::cout << config_line(config) << "\n"
                << "expr,value\n"
                << csv_field(a.expr) << ',' << shortest_double(value) << "\n";
      break;
    case Format::Plain:
      std::cout << config_line(config) << "\n" << shortest_double(value) << "\n";
      break;
  }
  return 0;
}

// ------------------------------------------------------------ hardy bracket

struct HardyArgs {
  std::string expr;
  int nmax = 8;
  long cnmax = 4000;
  bool no_extrapolate = false;
  int restarts = 32;
  int iterations = 500;
  int dim_cap = 12;
  double rho_tol = 1e-6;
};

int run_hardy_bracket(const HardyArgs& a, const CommonFlags& common) {
  const hardylab::MeanExpr e = hardylab::parse_mean(a.expr);
  hardylab::BracketConfig cfg;
  cfg.hn_max = a.nmax;
  cfg.harmonic_n_max = a.cnmax;
  cfg.extrapolate = !a.no_extrapolate;
  cfg.optimizer.restarts = a.restarts;
  cfg.optimizer.iterations = a.iterations;
  cfg.optimizer.seed = common.seed;
  cfg.optimizer.dimension_cap = a.dim_cap;
  cfg.rho_tol = a.rho_tol;
  const hardylab::HardyBracket bracket = hardylab::hardy_bracket(e, cfg);

  ordered_json config;
  config["expr"] = a.expr;
  config["nmax"] = a.nmax;
  config["cnmax"] = a.cnmax;
  config["extrapolate"] = !a.no_extrapolate;
  config["restarts"] = a.restarts;
  config["iterations"] = a.iterations;
  config["dim_cap"] = a.dim_cap;
  config["rho_tol"] = a.rho_tol;
  config["seed"] = common.seed;
  config["format"] = format_name(common.format());

  std::map<int, double> upper_by_n;
  for (const auto& [n, bound] : bracket.upper_theorem) {
    upper_by_n[n] = bound;
  }

  switch (common.format()) {
    case Format::Json:
      emit_json("hardy bracket", config, hardylab::to_json(bracket));
      break;
    case Format::Csv: {
      std::cout << config_line(config) << "\n" << "n,lower,upper\n";
      for (const hardylab::HardyN& row : bracket.lower_hn) {
        std::cout << row.n << ',' << shortest_double(row.lower) << ',';
        if (auto it = upper_by_n.find(row.n); it != upper_by_n.end()) {
          std::cout << shortest_double(it->second);
        }
        std::cout << "\n";
      }
      break;
    }
    case Format::Plain: {
      std::cout << config_line(config) << "\n";
      std::cout << "expr: " << hardylab::to_string(bracket.expr) << "\n";
      if (bracket.gamma_reference) {
        std::cout << "gamma_reference: "
                  << json_scalar_text(hardylab::json_number(*bracket.gamma_reference)) << "\n";
      }
      if (bracket.rho_reference) {
        std::cout << "rho_reference: " << shortest_double(*bracket.rho_reference) << "\n";
      }
      std::cout << "C_estimate: " << shortest_double(bracket.harmonic.estimate) << "\n";
      std::cout << "n lower upper\n";
      for (const hardylab::HardyN& row : bracket.lower_hn) {
        std::cout << row.n << ' ' << shortest_double(row.lower) << ' ';
        if (auto it = upper_by_n.find(row.n); it != upper_by_n.end()) {
          std::cout << shortest_double(it->second);
        } else {
          std::cout << '-';
        }
        std::cout << "\n";
      }
      for (const std::string& flag : bracket.flags) {
        std::cout << "flag: " << flag << "\n";
      }
      break;
    }
  }
  return 0;
}

// -------------------------------------------------------------------- rho

struct RhoArgs {
  double p = 0.0;
  double q = 0.0;
  double tol = 1e-6;
  long cells = 1000000;
  bool closed_only = false;
};

int run_rho(const RhoArgs& a, const CommonFlags& common) {
  const bool finite = hardylab::rho_finiteness(a.p, a.q);
  const std::optional<double> closed = hardylab::rho_closed(a.p, a.q);
  hardylab::QuadratureResult result;
  if (a.closed_only) {
    if (!closed) {
      throw hardylab::DomainError("no closed form catalogued for these exponents");
    }
    result.value = *closed;
    result.abs_error_estimate = 0.0;
    result.cells = 0;
    result.converged = true;
  } else {
    result = hardylab::rho(a.p, a.q, a.tol, a.cells);
  }

  ordered_json config;
  config["p"] = a.p;
  config["q"] = a.q;
  config["tol"] = a.tol;
  config["cells"] = a.cells;
  config["closed_only"] = a.closed_only;
  config["seed"] = common.seed;
  config["format"] = format_name(common.format());

  switch (common.format()) {
    case Format::Json: {
      ordered_json report;
      report["p"] = a.p;
      report["q"] = a.q;
      report["finite"] = finite;
      report.update(hardylab::to_json(result));
      if (closed) {
        report["closed_form"] = hardylab::json_number(*closed);
      }
      emit_json("rho", config, std::move(report));
      break;
    }
    case Format::Csv:
      std::cout << config_line(config) << "\n"
                << "p,q,value,abs_error_estimate,cells,converged\n"
                << shortest_double(a.p) << ',' << shortest_double(a.q) << ','
                << shortest_double(result.value) << ','
                << shortest_double(result.abs_error_estimate) << ',' << result.cells << ','
                << bool_text(result.converged) << "\n";
      break;
    case Format::Plain:
      std::cout << config_line(config) << "\n"
                << shortest_double(result.value) << " (abs_error_estimate "
                << shortest_double(result.abs_error_estimate) << ", cells " << result.cells
                << ", converged " << bool_text(result.converged) << ")\n";
      break;
  }
  return 0;
}

// ----------------------------------------------------------------- kedlaya

struct KedlayaBuildArgs {
  int n = 0;
  std::string out;
};

int run_kedlaya_build(const KedlayaBuildArgs& a, const CommonFlags& common) {
  const hardylab::kedlaya::KedlayaMatrix matrix = hardylab::kedlaya::build(a.n);
  const std::vector<hardylab::kedlaya::Violation> violations = hardylab::kedlaya::verify(matrix);
  const bool verified = violations.empty();

  ordered_json config;
  config["n"] = a.n;
  if (!a.out.empty()) {
    config["out"] = a.out;
  }
  config["seed"] = common.seed;
  config["format"] = format_name(common.format());

  if (!a.out.empty()) {
    std::ofstream file(a.out, std::ios::binary);
    if (!file) {
      throw hardylab::DomainError("cannot open output file: " + a.out);
    }
    file << hardylab::matrix_to_csv(matrix);
    if (!file.good()) {
      throw hardylab::DomainError("failed writing output file: " + a.out);
    }
  }

  switch (common.format()) {
    case Format::Json: {
      ordered_json report;
      report["n"] = matrix.n;
      report["size"] = matrix.size;
      report["verified"] = verified;
      if (a.out.empty()) {
        report["matrix"] = hardylab::to_json(matrix)["matrix"];
      } else {
        report["out"] = a.out;
      }
      emit_json("kedlaya build", config, std::move(report));
      break;
    }
    case Format::Csv:
      std::cout << config_line(config) << "\n";
      if (a.out.empty()) {
        std::cout << hardylab::matrix_to_csv(matrix);
      } else {
        std::cout << "n,size,verified,out\n"
                  << matrix.n << ',' << matrix.size << ',' << bool_text(verified) << ','
                  << csv_field(a.out) << "\n";
      }
      break;
    case Format::Plain:
      std::cout << config_line(config) << "\n";
      if (a.out.empty()) {
        std::cout << hardylab::matrix_to_csv(matrix);
      } else {
        std::cout << "wrote " << a.out << " (" << matrix.size << "x" << matrix.size
                  << ", verified " << bool_text(verified) << ")\n";
      }
      break;
  }
  return verified ? 0 : 1;
}

struct KedlayaVerifyArgs {
  std::string in;
  int n = 0;  // 0: take the side length's word for it
};

int run_kedlaya_verify(const KedlayaVerifyArgs& a, const CommonFlags& common) {
  std::ifstream file(a.in, std::ios::binary);
  if (!file) {
    throw hardylab::DomainError("cannot read input file: " + a.in);
  }
  std::stringstream buffer;
  buffer << file.rdbuf();
  const hardylab::kedlaya::KedlayaMatrix matrix = hardylab::matrix_from_csv(buffer.str());
  if (a.n != 0 && a.n != matrix.n) {
    throw hardylab::DomainError("matrix side is " + std::to_string(matrix.size) +
                                ", not compatible with --n " + std::to_string(a.n));
  }
  const std::vector<hardylab::kedlaya::Violation> violations = hardylab::kedlaya::verify(matrix);

  ordered_json config;
  config["in"] = a.in;
  config["n"] = matrix.n;
  config["seed"] = common.seed;
  config["format"] = format_name(common.format());

  switch (common.format()) {
    case Format::Json: {
      ordered_json report;
      report["n"] = matrix.n;
      report["size"] = matrix.size;
      ordered_json rows = ordered_json::array();
      for (const auto& v : violations) {
        rows.push_back(hardylab::to_json(v));
      }
      report["violations"] = std::move(rows);
      report["ok"] = violations.empty();
      emit_json("kedlaya verify", config, std::move(report));
      break;
    }
    case Format::Csv:
      std::cout << config_line(config) << "\n" << "axis,index,value,expected,actual\n";
      for (const auto& v : violations) {
        std::cout << (v.axis == 'r' ? "row" : "column") << ',' << v.index << ',' << v.value << ','
                  << v.expected << ',' << v.actual << "\n";
      }
      break;
    case Format::Plain:
      std::cout << config_line(config) << "\n";
      if (violations.empty()) {
        std::cout << "ok: all " << matrix.size << " row and column profiles match\n";
      } else {
        for (const auto& v : violations) {
          std::cout << (v.axis == 'r' ? "row " : "column ") << v.index << ": value " << v.value
                    << " appears " << v.actual << " times, expected " << v.expected << "\n";
        }
      }
      break;
  }
  return violations.empty() ? 0 : 1;
}

struct KedlayaCheckArgs {
  std::string expr;
  std::vector<double> x;
};

int run_kedlaya_check(const KedlayaCheckArgs& a, const CommonFlags& common) {
  const hardylab::MeanExpr e = hardylab::parse_mean(a.expr);
  const hardylab::kedlaya::MixingCheck check = hardylab::kedlaya::check_mixing_inequality(e, a.x);

  ordered_json config;
  config["expr"] = a.expr;
  config["x"] = a.x;
  config["seed"] = common.seed;
  config["format"] = format_name(common.format());

  const bool ok = check.holds && check.corollary_holds;
  switch (common.format()) {
    case Format::Json: {
      ordered_json report;
      report["expr"] = a.expr;
      report["n"] = a.x.size();
      report.update(hardylab::to_json(check));
      emit_json("kedlaya check", config, std::move(report));
      break;
    }
    case Format::Csv:
      std::cout << config_line(config) << "\n"
                << "n,lhs,rhs,holds,corollary_rhs,corollary_holds\n"
                << a.x.size() << ',' << shortest_double(check.lhs) << ','
                << shortest_double(check.rhs) << ',' << bool_text(check.holds) << ','
                << shortest_double(check.corollary_rhs) << ',' << bool_text(check.corollary_holds)
                << "\n";
      break;
    case Format::Plain:
      std::cout << config_line(config) << "\n"
                << "lhs " << shortest_double(check.lhs) << " <= rhs "
                << shortest_double(check.rhs) << ": " << (check.holds ? "holds" : "VIOLATED")
                << "\n"
                << "lhs " << shortest_double(check.lhs) << " <= corollary rhs "
                << shortest_double(check.corollary_rhs) << ": "
                << (check.corollary_holds ? "holds" : "VIOLATED") << "\n";
      break;
  }
  return ok ? 0 : 1;
}

// --------------------------------------------------------------- props run

struct PropsArgs {
  std::string expr;
  std::vector<std::string> props;
  int trials = 1000;
  int mmax = 4;
};

int run_props(const PropsArgs& a, const CommonFlags& common) {
  const hardylab::MeanExpr e = hardylab::parse_mean(a.expr);

  std::vector<hardylab::AuditReport> reports;
  for (const std::string& name : a.props) {
    if (name == "symmetry") {
      reports.push_back(hardylab::audit_symmetry(e, a.trials, common.seed));
    } else if (name == "concavity") {
      reports.push_back(hardylab::audit_midpoint_concavity(e, a.trials, common.seed));
    } else if (name == "monotonicity") {
      reports.push_back(hardylab::audit_monotonicity(e, a.trials, common.seed));
    } else if (name == "repetition-invariant") {
      reports.push_back(hardylab::audit_repetition(e, hardylab::RepetitionMode::Invariant,
                                                   a.trials, common.seed, a.mmax));
    } else if (name == "repetition-superinvariant") {
      reports.push_back(hardylab::audit_repetition(e, hardylab::RepetitionMode::Superinvariant,
                                                   a.trials, common.seed, a.mmax));
    } else if (name == "concave-implies-monotone") {
      reports.push_back(hardylab::audit_concave_implies_monotone(e, a.trials, common.seed));
    } else if (name == "circ-square-identity") {
      const std::optional<hardylab::PowerMix> mix = hardylab::as_power_mix(e);
      if (!mix) {
        throw hardylab::DomainError(
            "circ-square-identity needs a mix of two power leaves, got " + a.expr);
      }
      reports.push_back(
          hardylab::audit_circ_square_identity(mix->p, mix->q, a.trials, common.seed));
    } else {
      std::cerr << "error: unknown property '" << name
                << "' (expected symmetry, concavity, monotonicity, repetition-invariant, "
                   "repetition-superinvariant, concave-implies-monotone, circ-square-identity)\n";
      return 2;
    }
  }

  ordered_json config;
  config["expr"] = a.expr;
  {
    std::string joined;
    for (const std::string& name : a.props) {
      if (!joined.empty()) joined += ',';
      joined += name;
    }
    config["props"] = joined;
  }
  config["trials"] = a.trials;
  config["mmax"] = a.mmax;
  config["seed"] = common.seed;
  config["format"] = format_name(common.format());

  bool pass = true;
  for (const hardylab::AuditReport& r : reports) {
    pass = pass && r.pass;
  }

  switch (common.format()) {
    case Format::Json: {
      ordered_json report;
      report["expr"] = a.expr;
      ordered_json rows = ordered_json::array();
      for (const hardylab::AuditReport& r : reports) {
        rows.push_back(hardylab::to_json(r));
      }
      report["reports"] = std::move(rows);
      report["pass"] = pass;
      emit_json("props run", config, std::move(report));
      break;
    }
    case Format::Csv:
      std::cout << config_line(config) << "\n" << "property,trials,verdict,seed\n";
      for (const hardylab::AuditReport& r : reports) {
        std::cout << csv_field(r.property) << ',' << r.trials << ','
                  << (r.pass ? "pass" : "counterexample") << ',' << r.seed << "\n";
      }
      break;
    case Format::Plain:
      std::cout << config_line(config) << "\n";
      for (const hardylab::AuditReport& r : reports) {
        std::cout << r.property << ": " << (r.pass ? "pass" : "counterexample") << " ("
                  << r.trials << " trials, seed " << r.seed << ")";
        if (!r.note.empty()) {
          std::cout << " [" << r.note << "]";
        }
        std::cout << "\n";
        if (r.witness) {
          std::cout << "  witness";
          if (r.witness->m != 0) {
            std::cout << " m=" << r.witness->m;
          }
          std::cout << " x=[";
          for (std::size_t i = 0; i < r.witness->x.size(); ++i) {
            std::cout << (i ? "," : "") << shortest_double(r.witness->x[i]);
          }
          std::cout << "] lhs=" << shortest_double(r.witness->lhs)
                    << " rhs=" << shortest_double(r.witness->rhs) << " (" << r.witness->note
                    << ")\n";
        }
      }
      break;
  }
  return pass ? 0 : 1;
}

// --------------------------------------------------------------- reproduce

struct ReproduceArgs {
  std::string only;
  double quad_tol = 1e-7;
  long quad_cells = 1000000;
  int samples = 20;
};

struct ReproRow {
  std::string name;
  double computed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  double error = 0.0;
  bool pass = false;
  std::string note;
};

int run_reproduce(const ReproduceArgs& a, const CommonFlags& common) {
  const std::vector<std::string> all_names = {"rho01",  "rho0m1",  "rho00",       "logint",
                                              "product", "gamma0", "gammahalf",   "gammam1",
                                              "hardy01", "hardy0m1circ", "hardy0m1sq"};
  if (!a.only.empty() &&
      std::find(all_names.begin(), all_names.end(), a.only) == all_names.end()) {
    std::cerr << "error: unknown row '" << a.only << "' for --only\n";
    return 2;
  }
  auto wanted = [&](const std::string& name) { return a.only.empty() || a.only == name; };

  std::vector<ReproRow> rows;
  auto add_value_row = [&](const std::string& name, double computed, double reference,
                           double tolerance, bool converged) {
    ReproRow row;
    row.name = name;
    row.computed = computed;
    row.reference = reference;
    row.tolerance = tolerance;
    row.error = std::abs(computed - reference);
    row.pass = converged && row.error <= tolerance;
    if (!converged) {
      row.note = "quadrature did not converge";
    }
    rows.push_back(std::move(row));
  };

  std::optional<hardylab::QuadratureResult> rho01;
  std::optional<hardylab::QuadratureResult> rho0m1;
  if (wanted("rho01") || wanted("product")) {
    rho01 = hardylab::rho(0.0, 1.0, a.quad_tol, a.quad_cells);
  }
  if (wanted("rho0m1") || wanted("product")) {
    rho0m1 = hardylab::rho(0.0, -1.0, a.quad_tol, a.quad_cells);
  }

  if (wanted("rho01")) {
    add_value_row("rho01", rho01->value, 2.0 * std::sqrt(std::exp(1.0)), 1e-6, rho01->converged);
  }
  if (wanted("rho0m1")) {
    add_value_row("rho0m1", rho0m1->value, std::exp(1.5) / 2.0, 1e-6, rho0m1->converged);
  }
  if (wanted("rho00")) {
    const hardylab::QuadratureResult r = hardylab::rho(0.0, 0.0, a.quad_tol, a.quad_cells);
    add_value_row("rho00", r.value, std::exp(1.0), 0.0, r.converged);
  }
  if (wanted("logint")) {
    const hardylab::QuadratureResult r =
        hardylab::log_mean_integral(std::min(a.quad_tol, 1e-9), a.quad_cells);
    add_value_row("logint", r.value, std::log(2.0) - 1.5, 1e-8, r.converged);
  }
  if (wanted("product")) {
    add_value_row("product", rho01->value * rho0m1->value, std::exp(2.0), 1e-6,
                  rho01->converged && rho0m1->converged);
  }
  if (wanted("gamma0")) {
    add_value_row("gamma0", hardylab::gamma(0.0), std::exp(1.0), 1e-12, true);
  }
  if (wanted("gammahalf")) {
    add_value_row("gammahalf", hardylab::gamma(0.5), 4.0, 1e-12, true);
  }
  if (wanted("gammam1")) {
    add_value_row("gammam1", hardylab::gamma(-1.0), 2.0, 1e-12, true);
  }

  // The three headline truncated inequalities, each on the same seeded
  // summable samples; the row value is the worst margin seen.
  struct MarginRow {
    const char* name;
    const char* expr;
    double constant;
  };
  const MarginRow margin_rows[] = {
      {"hardy01", "sq(P[0],P[1])", 2.0 * std::sqrt(std::exp(1.0))},
      {"hardy0m1circ", "circ(P[0],P[-1])", std::exp(1.5) / 2.0},
      {"hardy0m1sq", "sq(P[0],P[-1])", std::exp(1.5) / 2.0},
  };
  std::vector<std::vector<double>> samples;
  for (const MarginRow& m : margin_rows) {
    if (!wanted(m.name)) {
      continue;
    }
    if (samples.empty()) {
      samples = hardylab::seeded_l1_samples(common.seed, a.samples);
    }
    const hardylab::MeanExpr e = hardylab::parse_mean(m.expr);
    double worst = std::numeric_limits<double>::infinity();
    for (const std::vector<double>& x : samples) {
      worst = std::min(worst, hardylab::truncated_hardy_check(e, x, m.constant).margin);
    }
    ReproRow row;
    row.name = m.name;
    row.computed = worst;
    row.reference = 0.0;
    row.tolerance = 0.0;
    row.error = std::max(0.0, -worst);
    row.pass = worst >= 0.0;
    rows.push_back(std::move(row));
  }

  ordered_json config;
  if (!a.only.empty()) {
    config["only"] = a.only;
  }
  config["quad_tol"] = a.quad_tol;
  config["quad_cells"] = a.quad_cells;
  config["samples"] = a.samples;
  config["seed"] = common.seed;
  config["format"] = format_name(common.format());

  bool pass = true;
  for (const ReproRow& row : rows) {
    pass = pass && row.pass;
  }

  switch (common.format()) {
    case Format::Json: {
      ordered_json report;
      ordered_json out_rows = ordered_json::array();
      for (const ReproRow& row : rows) {
        ordered_json r;
        r["name"] = row.name;
        r["computed"] = hardylab::json_number(row.computed);
        r["reference"] = hardylab::json_number(row.reference);
        r["tolerance"] = row.tolerance;
        r["error"] = hardylab::json_number(row.error);
        r["pass"] = row.pass;
        if (!row.note.empty()) {
          r["note"] = row.note;
        }
        out_rows.push_back(std::move(r));
      }
      report["rows"] = std::move(out_rows);
      report["pass"] = pass;
      emit_json("reproduce", config, std::move(report));
      break;
    }
    case Format::Csv:
      std::cout << config_line(config) << "\n"
                << "name,computed,reference,tolerance,error,pass\n";
      for (const ReproRow& row : rows) {
        std::cout << row.name << ',' << shortest_double(row.computed) << ','
                  << shortest_double(row.reference) << ',' << shortest_double(row.tolerance)
                  << ',' << shortest_double(row.error) << ',' << bool_text(row.pass) << "\n";
      }
      break;
    case Format::Plain: {
      std::cout << config_line(config) << "\n";
      char line[160];
      std::snprintf(line, sizeof line, "%-14s %-16s %-16s %-10s %-12s %s", "name", "computed",
                    "reference", "tol", "error", "pass");
      std::cout << line << "\n";
      for (const ReproRow& row : rows) {
        std::snprintf(line, sizeof line, "%-14s %-16.8g %-16.8g %-10.2g %-12.3g %s",
                      row.name.c_str(), row.computed, row.reference, row.tolerance, row.error,
                      row.pass ? "pass" : "FAIL");
        std::cout << line;
        if (!row.note.empty()) {
          std::cout << "  (" << row.note << ")";
        }
        std::cout << "\n";
      }
      break;
    }
  }

  if (!pass) {
    for (const ReproRow& row : rows) {
      if (!row.pass) {
        std::cerr << "check failed: " << row.name << " computed "
                  << shortest_double(row.computed) << " vs " << shortest_double(row.reference)
                  << " (tolerance " << shortest_double(row.tolerance) << ")\n";
      }
    }
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-mean Hardy constants: evaluation, brackets, audits, reproduction"};
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "Read defaults from a key=value config file");

  CommonFlags common;
  app.add_option("--seed", common.seed, "Seed for every randomized component");
  CLI::Option* json_flag = app.add_flag("--json", common.json, "Emit a JSON report");
  CLI::Option* csv_flag = app.add_flag("--csv", common.csv, "Emit a CSV report");
  json_flag->excludes(csv_flag);
  csv_flag->excludes(json_flag);

  int code = 0;

  CLI::App* mean = app.add_subcommand("mean", "Evaluate mean expressions");
  mean->require_subcommand(1);
  mean->fallthrough();
  MeanEvalArgs mean_args;
  CLI::App* mean_eval = mean->add_subcommand("eval", "Evaluate an expression on a sample");
  mean_eval->fallthrough();
  mean_eval->add_option("--expr", mean_args.expr, "Mean expression, e.g. sq(P[0],P[1])")
      ->required();
  mean_eval->add_option("--x", mean_args.x, "Comma-separated positive values")
      ->required()
      ->delimiter(',');
  mean_eval->add_option("--w", mean_args.w, "Optional weights, one per value")->delimiter(',');
  mean_eval->callback([&] { code = run_mean_eval(mean_args, common); });

  CLI::App* hardy = app.add_subcommand("hardy", "Hardy constant brackets");
  hardy->require_subcommand(1);
  hardy->fallthrough();
  HardyArgs hardy_args;
  CLI::App* hardy_bracket = hardy->add_subcommand("bracket", "Bracket the Hardy constant");
  hardy_bracket->fallthrough();
  hardy_bracket->add_option("--expr", hardy_args.expr, "Mean expression")->required();
  hardy_bracket->add_option("--nmax", hardy_args.nmax, "Largest n for the lower sequence");
  hardy_bracket->add_option("--cnmax", hardy_args.cnmax, "Harmonic sequence length");
  hardy_bracket->add_flag("--no-extrapolate", hardy_args.no_extrapolate,
                          "Report the raw harmonic tail minimum");
  hardy_bracket->add_option("--restarts", hardy_args.restarts, "Optimizer restarts per n");
  hardy_bracket->add_option("--iterations", hardy_args.iterations, "Optimizer iterations");
  hardy_bracket->add_option("--dim-cap", hardy_args.dim_cap, "Hard cap on optimized n");
  hardy_bracket->add_option("--rho-tol", hardy_args.rho_tol,
                            "Quadrature tolerance for the reference constant");
  hardy_bracket->callback([&] { code = run_hardy_bracket(hardy_args, common); });

  RhoArgs rho_args;
  CLI::App* rho_cmd = app.add_subcommand("rho", "Sharp mixed-mean constant by quadrature");
  rho_cmd->fallthrough();
  rho_cmd->add_option("--p", rho_args.p, "Outer exponent")->required();
  rho_cmd->add_option("--q", rho_args.q, "Inner exponent")->required();
  rho_cmd->add_option("--tol", rho_args.tol, "Absolute tolerance on the constant");
  rho_cmd->add_option("--cells", rho_args.cells, "Adaptive cell budget");
  rho_cmd->add_flag("--closed-only", rho_args.closed_only, "Use the catalogued closed form");
  rho_cmd->callback([&] { code = run_rho(rho_args, common); });

  CLI::App* kedlaya = app.add_subcommand("kedlaya", "Combinatorial matrices and mixing checks");
  kedlaya->require_subcommand(1);
  kedlaya->fallthrough();
  KedlayaBuildArgs kb_args;
  CLI::App* kedlaya_build = kedlaya->add_subcommand("build", "Construct the n-th matrix");
  kedlaya_build->fallthrough();
  kedlaya_build->add_option("--n", kb_args.n, "Matrix parameter (1..5)")->required();
  kedlaya_build->add_option("--out", kb_args.out, "Write the matrix to a CSV file");
  kedlaya_build->callback([&] { code = run_kedlaya_build(kb_args, common); });

  KedlayaVerifyArgs kv_args;
  CLI::App* kedlaya_verify = kedlaya->add_subcommand("verify", "Verify a matrix file");
  kedlaya_verify->fallthrough();
  kedlaya_verify->add_option("--in", kv_args.in, "Matrix CSV file")->required();
  kedlaya_verify->add_option("--n", kv_args.n, "Expected matrix parameter");
  kedlaya_verify->callback([&] { code = run_kedlaya_verify(kv_args, common); });

  KedlayaCheckArgs kc_args;
  CLI::App* kedlaya_check = kedlaya->add_subcommand("check", "Check the prefix-mixing inequality");
  kedlaya_check->fallthrough();
  kedlaya_check->add_option("--expr", kc_args.expr, "Mean expression")->required();
  kedlaya_check->add_option("--x", kc_args.x, "Comma-separated positive values")
      ->required()
      ->delimiter(',');
  kedlaya_check->callback([&] { code = run_kedlaya_check(kc_args, common); });

  CLI::App* props = app.add_subcommand("props", "Property audits");
  props->require_subcommand(1);
  props->fallthrough();
  PropsArgs props_args;
  CLI::App* props_run = props->add_subcommand("run", "Run seeded property audits");
  props_run->fallthrough();
  props_run->add_option("--expr", props_args.expr, "Mean expression")->required();
  props_run
      ->add_option("--props", props_args.props,
                   "Comma-separated audits: symmetry, concavity, monotonicity, "
                   "repetition-invariant, repetition-superinvariant, "
                   "concave-implies-monotone, circ-square-identity")
      ->required()
      ->delimiter(',');
  props_run->add_option("--trials", props_args.trials, "Random trials per audit");
  props_run->add_option("--mmax", props_args.mmax, "Largest repetition factor");
  props_run->callback([&] { code = run_props(props_args, common); });

  ReproduceArgs repro_args;
  CLI::App* reproduce = app.add_subcommand("reproduce", "Recompute the headline constants");
  reproduce->fallthrough();
  reproduce->add_option("--only", repro_args.only, "Run a single named row");
  reproduce->add_option("--quad-tol", repro_args.quad_tol, "Quadrature tolerance");
  reproduce->add_option("--quad-cells", repro_args.quad_cells, "Quadrature cell budget");
  reproduce->add_option("--samples", repro_args.samples, "Seeded summable samples per margin row");
  reproduce->callback([&] { code = run_reproduce(repro_args, common); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const hardylab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hardylab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return code;
}
