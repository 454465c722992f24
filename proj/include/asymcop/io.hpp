#pragma once

// Data and report plumbing for the command-line tools: headered CSV input
// (rows with non-numeric or non-finite cells are dropped and counted),
// deterministic CSV output, and JSON (de)serialization of fit results. The
// JSON encoding round-trips every FitResult field exactly: finite doubles
// rely on the serializer's shortest round-trip representation and non-finite
// values are stored as the strings "inf", "-inf", and "nan".

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "asymcop/common.hpp"
#include "asymcop/copula.hpp"
#include "asymcop/inference.hpp"
#include "asymcop/margins.hpp"
#include "asymcop/tails.hpp"

namespace asymcop::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Name parsing (inverse of family_name / asym_side_name).

inline Family family_from_name(const std::string& name) {
  for (Family f : {Family::Independence, Family::Plackett, Family::Clayton,
                   Family::ClaytonSurvival, Family::Gumbel, Family::Asymmetrized,
                   Family::FrailtyMixed}) {
    if (name == family_name(f)) return f;
  }
  throw domain_error("unknown family name '" + name +
                     "' (expected plackett, gumbel, or clayton_survival)");
}

inline AsymSide side_from_name(const std::string& name) {
  if (name == "first") return AsymSide::First;
  if (name == "second") return AsymSide::Second;
  if (name == "both") return AsymSide::Both;
  throw domain_error("unknown asymmetry side '" + name +
                     "' (expected first, second, or both)");
}

// ---------------------------------------------------------------------------
// CSV input.

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // every row has columns.size() cells
  std::size_t n_dropped = 0;              // rows lost to NaN / non-numeric cells
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline bool parse_cell(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size() && std::isfinite(out);
}

}  // namespace detail

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open input file '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line))
    throw domain_error("input file '" + path + "' is empty");
  t.columns = detail::split_csv_line(line);
  if (t.columns.empty() || t.columns[0].empty())
    throw domain_error("input file '" + path + "' has no header row");
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    std::vector<double> row(t.columns.size());
    bool ok = cells.size() == t.columns.size();
    for (std::size_t i = 0; ok && i < cells.size(); ++i)
      ok = detail::parse_cell(cells[i], row[i]);
    if (ok)
      t.rows.push_back(std::move(row));
    else
      ++t.n_dropped;
  }
  return t;
}

inline std::size_t column_index(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  std::string have;
  for (const auto& c : t.columns) have += (have.empty() ? "" : ", ") + c;
  throw domain_error("column '" + name + "' not found (file has: " + have +
                     ")");
}

inline std::vector<std::pair<double, double>> extract_pairs(
    const Table& t, const std::string& c1, const std::string& c2) {
  std::size_t i = column_index(t, c1), j = column_index(t, c2);
  std::vector<std::pair<double, double>> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) out.emplace_back(row[i], row[j]);
  return out;
}

// ---------------------------------------------------------------------------
// CSV output. %.17g preserves doubles exactly, so rewriting the same numbers
// yields byte-identical files.

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_pairs_csv(const std::string& path, const std::string& h1,
                            const std::string& h2,
                            const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path);
  if (!out) throw domain_error("cannot write output file '" + path + "'");
  out << h1 << ',' << h2 << '\n';
  for (const auto& [a, b] : rows)
    out << format_double(a) << ',' << format_double(b) << '\n';
  if (!out) throw domain_error("failed while writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// JSON primitives. Non-finite doubles are encoded as strings so they survive
// a round trip (the serializer would otherwise emit null).

inline json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw domain_error("malformed number in JSON report");
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw domain_error("cannot write output file '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw domain_error("failed while writing '" + path + "'");
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open JSON file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw domain_error("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw domain_error("cannot write output file '" + path + "'");
  out << body;
  if (!out) throw domain_error("failed while writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// FitResult and friends.

inline json fit_result_to_json(const FitResult& f) {
  json j;
  j["label"] = f.spec.label();
  j["family"] = family_name(f.spec.family);
  j["level"] = f.spec.level;
  j["side"] = asym_side_name(f.spec.side);
  j["param_names"] = f.param_names;
  json params = json::array();
  for (double p : f.params) params.push_back(number_to_json(p));
  j["params"] = params;
  json errs = json::array();
  for (const auto& s : f.stderrs)
    errs.push_back(s ? json(number_to_json(*s)) : json(nullptr));
  j["stderr"] = errs;
  j["loglik"] = number_to_json(f.loglik);
  j["bic"] = number_to_json(f.bic_value);
  if (f.hessian.empty()) {
    j["hessian"] = nullptr;
  } else {
    json h = json::array();
    for (const auto& row : f.hessian) {
      json r = json::array();
      for (double x : row) r.push_back(number_to_json(x));
      h.push_back(std::move(r));
    }
    j["hessian"] = std::move(h);
  }
  j["converged"] = f.converged;
  j["degenerate"] = f.degenerate;
  j["n_eval"] = f.n_eval;
  j["n_obs"] = f.n_obs;
  j["notes"] = f.notes;
  return j;
}

inline FitResult fit_result_from_json(const json& j) {
  FitResult f;
  f.spec.family = family_from_name(j.at("family").get<std::string>());
  f.spec.level = j.at("level").get<int>();
  f.spec.side = side_from_name(j.at("side").get<std::string>());
  f.param_names = j.at("param_names").get<std::vector<std::string>>();
  for (const auto& p : j.at("params")) f.params.push_back(number_from_json(p));
  for (const auto& s : j.at("stderr"))
    f.stderrs.push_back(s.is_null()
                            ? std::optional<double>{}
                            : std::optional<double>{number_from_json(s)});
  f.loglik = number_from_json(j.at("loglik"));
  f.bic_value = number_from_json(j.at("bic"));
  if (!j.at("hessian").is_null()) {
    for (const auto& row : j.at("hessian")) {
      std::vector<double> r;
      for (const auto& x : row) r.push_back(number_from_json(x));
      f.hessian.push_back(std::move(r));
    }
  }
  f.converged = j.at("converged").get<bool>();
  f.degenerate = j.at("degenerate").get<bool>();
  f.n_eval = j.at("n_eval").get<int>();
  f.n_obs = j.at("n_obs").get<std::size_t>();
  f.notes = j.at("notes").get<std::vector<std::string>>();
  return f;
}

inline json lr_test_to_json(const LrTest& t, const std::string& restricted,
                            const std::string& full) {
  json j;
  j["restricted"] = restricted;
  j["full"] = full;
  j["statistic"] = number_to_json(t.statistic);
  j["df"] = t.df;
  j["p_value"] = number_to_json(t.p_value);
  return j;
}

inline json ladder_to_json(const LadderFit& lf) {
  json j;
  j["family"] = family_name(lf.family);
  j["side"] = asym_side_name(lf.side);
  json levels = json::array();
  for (const auto& fit : lf.levels) levels.push_back(fit_result_to_json(fit));
  j["levels"] = std::move(levels);
  json tests = json::array();
  for (std::size_t k = 0; k + 1 < lf.levels.size() && k < lf.lr_chain.size();
       ++k)
    tests.push_back(lr_test_to_json(lf.lr_chain[k],
                                    lf.levels[k].spec.label(),
                                    lf.levels[k + 1].spec.label()));
  j["lr_tests"] = std::move(tests);
  if (lf.tail) {
    j["tail_upper"] = {{"lambda", number_to_json(lf.tail->lambda)},
                       {"std_error", number_to_json(lf.tail->std_error)}};
  } else {
    j["tail_upper"] = nullptr;
  }
  return j;
}

inline json grid_to_json(const GridFit& grid) {
  json j;
  json ladders = json::array();
  for (const auto& lf : grid.ladders) ladders.push_back(ladder_to_json(lf));
  j["ladders"] = std::move(ladders);
  j["best"] = {{"label", grid.best().spec.label()},
               {"family", family_name(grid.best().spec.family)},
               {"level", grid.best().spec.level},
               {"bic", number_to_json(grid.best().bic_value)}};
  return j;
}

// ---------------------------------------------------------------------------
// Margin models. The sorted training sample is part of the model (it carries
// the empirical body), so it is serialized too.

inline json margin_to_json(const MarginModel& m, const std::string& column) {
  json j;
  j["column"] = column;
  j["threshold"] = number_to_json(m.threshold);
  j["percentile"] = number_to_json(m.percentile);
  j["gpd_scale"] = number_to_json(m.gpd_scale);
  j["gpd_shape"] = number_to_json(m.gpd_shape);
  j["n"] = m.sorted_sample.size();
  json sample = json::array();
  for (double x : m.sorted_sample) sample.push_back(number_to_json(x));
  j["sample"] = std::move(sample);
  return j;
}

inline MarginModel margin_from_json(const json& j, std::string* column = nullptr) {
  MarginModel m;
  if (column != nullptr) *column = j.at("column").get<std::string>();
  m.threshold = number_from_json(j.at("threshold"));
  m.percentile = number_from_json(j.at("percentile"));
  m.gpd_scale = number_from_json(j.at("gpd_scale"));
  m.gpd_shape = number_from_json(j.at("gpd_shape"));
  for (const auto& x : j.at("sample"))
    m.sorted_sample.push_back(number_from_json(x));
  if (!std::is_sorted(m.sorted_sample.begin(), m.sorted_sample.end()))
    throw domain_error("margin sample in JSON is not sorted");
  return m;
}

}  // namespace asymcop::io
