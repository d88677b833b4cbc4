#include "hardylab/serialize.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include "hardylab/errors.hpp"
#include "hardylab/grammar.hpp"

namespace hardylab {

ordered_json json_number(double x) {
  if (std::isnan(x)) {
    return nullptr;
  }
  if (std::isinf(x)) {
    return x > 0 ? "+inf" : "-inf";
  }
  return x;
}

ordered_json to_json(const QuadratureResult& r) {
  ordered_json j;
  j["value"] = json_number(r.value);
  j["abs_error_estimate"] = json_number(r.abs_error_estimate);
  j["cells"] = r.cells;
  j["converged"] = r.converged;
  return j;
}

ordered_json to_json(const HarmonicTail& t) {
  ordered_json j;
  j["estimate"] = json_number(t.estimate);
  j["raw_tail_min"] = json_number(t.raw_tail_min);
  if (t.accelerated) {
    j["accelerated"] = json_number(*t.accelerated);
  }
  j["diverging"] = t.diverging;
  j["n_used"] = t.n_used;
  ordered_json tail = ordered_json::array();
  for (const auto& [n, value] : t.tail) {
    tail.push_back(ordered_json{n, json_number(value)});
  }
  j["tail"] = std::move(tail);
  return j;
}

ordered_json to_json(const HardyBracket& b) {
  ordered_json j;
  j["expr"] = to_string(b.expr);
  if (b.gamma_reference) {
    j["gamma_reference"] = json_number(*b.gamma_reference);
  }
  if (b.rho_reference) {
    j["rho_reference"] = json_number(*b.rho_reference);
  }
  j["C_estimate"] = json_number(b.harmonic.estimate);
  j["harmonic"] = to_json(b.harmonic);
  ordered_json hn = ordered_json::array();
  for (const HardyN& row : b.lower_hn) {
    ordered_json entry;
    entry["n"] = row.n;
    entry["lower"] = json_number(row.lower);
    entry["maximizer"] = row.maximizer;
    hn.push_back(std::move(entry));
  }
  j["Hn"] = std::move(hn);
  ordered_json upper = ordered_json::array();
  for (const auto& [n, bound] : b.upper_theorem) {
    upper.push_back(ordered_json{{"n", n}, {"bound", json_number(bound)}});
  }
  j["upper"] = std::move(upper);
  j["flags"] = b.flags;
  return j;
}

ordered_json to_json(const AuditReport& r) {
  ordered_json j;
  j["property"] = r.property;
  j["trials"] = r.trials;
  j["verdict"] = r.pass ? "pass" : "counterexample";
  j["seed"] = r.seed;
  if (!r.note.empty()) {
    j["note"] = r.note;
  }
  if (r.witness) {
    ordered_json w;
    w["x"] = r.witness->x;
    w["y"] = r.witness->y;
    w["lhs"] = json_number(r.witness->lhs);
    w["rhs"] = json_number(r.witness->rhs);
    w["m"] = r.witness->m;
    w["note"] = r.witness->note;
    j["witness"] = std::move(w);
  }
  return j;
}

ordered_json to_json(const kedlaya::Violation& v) {
  ordered_json j;
  j["axis"] = v.axis == 'r' ? "row" : "column";
  j["index"] = v.index;
  j["value"] = v.value;
  j["expected"] = v.expected;
  j["actual"] = v.actual;
  return j;
}

ordered_json to_json(const kedlaya::MixingCheck& c) {
  ordered_json j;
  j["lhs"] = json_number(c.lhs);
  j["rhs"] = json_number(c.rhs);
  j["holds"] = c.holds;
  j["corollary_rhs"] = json_number(c.corollary_rhs);
  j["corollary_holds"] = c.corollary_holds;
  return j;
}

ordered_json to_json(const kedlaya::KedlayaMatrix& m) {
  ordered_json j;
  j["n"] = m.n;
  j["size"] = m.size;
  ordered_json rows = ordered_json::array();
  for (long r = 0; r < m.size; ++r) {
    ordered_json row = ordered_json::array();
    for (long c = 0; c < m.size; ++c) {
      row.push_back(static_cast<int>(m.at(r, c)));
    }
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

std::string matrix_to_csv(const kedlaya::KedlayaMatrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size * m.size) * 2);
  for (long r = 0; r < m.size; ++r) {
    for (long c = 0; c < m.size; ++c) {
      if (c > 0) {
        out.push_back(',');
      }
      out += std::to_string(static_cast<int>(m.at(r, c)));
    }
    out.push_back('\n');
  }
  return out;
}

kedlaya::KedlayaMatrix matrix_from_csv(const std::string& text) {
  std::vector<std::uint8_t> entries;
  std::vector<std::size_t> row_lengths;
  std::size_t current = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) {
      continue;
    }
    current = 0;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t consumed = 0;
      int value = 0;
      try {
        value = std::stoi(cell, &consumed);
      } catch (const std::exception&) {
        throw DomainError("matrix file holds a non-integer cell: " + cell);
      }
      if (consumed != cell.size() || value < 1 || value > 255) {
        throw DomainError("matrix file holds an out-of-range cell: " + cell);
      }
      entries.push_back(static_cast<std::uint8_t>(value));
      ++current;
    }
    row_lengths.push_back(current);
  }
  if (row_lengths.empty()) {
    throw DomainError("matrix file is empty");
  }
  const std::size_t size = row_lengths.size();
  for (std::size_t len : row_lengths) {
    if (len != size) {
      throw DomainError("matrix file is not square");
    }
  }
  int n = 0;
  for (int candidate = 1; candidate <= 20; ++candidate) {
    if (static_cast<std::size_t>(kedlaya::factorial(candidate)) == size) {
      n = candidate;
      break;
    }
  }
  if (n == 0) {
    throw DomainError("matrix side is not a factorial");
  }
  kedlaya::KedlayaMatrix m;
  m.n = n;
  m.size = static_cast<long>(size);
  m.entries = std::move(entries);
  return m;
}

}  // namespace hardylab
