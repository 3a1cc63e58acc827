#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmnorm/config.hpp"
#include "rmnorm/matrix_io.hpp"
#include "rmnorm/montecarlo.hpp"

namespace rmnorm {

// One row of a bounds or sweep table. Optional fields are left empty when they
// were not computed or when a ratio's denominator is zero.
struct BoundReport {
  std::string family;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0; // 0: no sampling was done
  std::string dist;
  double trivial = 0.0;
  std::optional<double> chevet;
  double latala = 0.0;
  double log_factor = 0.0;
  double log_three_halves = 0.0;
  double expectation_threshold = 0.0; // needs mc_lower; 0 otherwise
  double surrogate = 0.0;
  std::optional<McEstimate> mc_opnorm;
  std::optional<McEstimate> mc_lower; // E(max row + max col)
  std::optional<double> ratio_op_lower;
  std::optional<double> ratio_op_logxlower;
  std::optional<double> ratio_op_surrogate;
  std::optional<double> ratio_lower_surrogate;
};

// One line of a verification report. A check passes when lhs <= rhs.
struct CheckResult {
  std::string check;
  std::string subject;
  std::size_t n = 0;
  std::size_t samples = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
  std::string detail;

  double margin() const { return rhs - lhs; }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed)
        return false;
    return true;
  }
};

inline const std::vector<std::string>& bound_report_columns() {
  static const std::vector<std::string> cols = {
      "family",     "n",        "m",          "seed",          "samples",          "dist",
      "trivial",    "chevet",   "latala",     "log_factor",    "rs_corollary",     "surrogate",
      "mc_opnorm",  "mc_opnorm_stderr", "mc_lower", "mc_lower_stderr", "ratio_op_lower", "ratio_op_logxlower"};
  return cols;
}

namespace detail {

inline std::string csv_cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

inline nlohmann::ordered_json json_value(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace detail

inline std::string format_bound_reports_csv(const std::vector<BoundReport>& rows) {
  std::string out;
  const auto& cols = bound_report_columns();
  for (std::size_t k = 0; k < cols.size(); ++k)
    out += (k ? "," : "") + cols[k];
  out += '\n';
  auto mc = [](const std::optional<McEstimate>& e, bool se) -> std::optional<double> {
    if (!e)
      return std::nullopt;
    return se ? e->std_error : e->mean;
  };
  for (const auto& r : rows) {
    const std::vector<std::string> cells = {detail::csv_quote(r.family),
                                            std::to_string(r.n),
                                            std::to_string(r.m),
                                            std::to_string(r.seed),
                                            std::to_string(r.samples),
                                            detail::csv_quote(r.dist),
                                            format_real(r.trivial),
                                            detail::csv_cell(r.chevet),
                                            format_real(r.latala),
                                            format_real(r.log_factor),
                                            format_real(r.log_three_halves),
                                            format_real(r.surrogate),
                                            detail::csv_cell(mc(r.mc_opnorm, false)),
                                            detail::csv_cell(mc(r.mc_opnorm, true)),
                                            detail::csv_cell(mc(r.mc_lower, false)),
                                            detail::csv_cell(mc(r.mc_lower, true)),
                                            detail::csv_cell(r.ratio_op_lower),
                                            detail::csv_cell(r.ratio_op_logxlower)};
    for (std::size_t k = 0; k < cells.size(); ++k)
      out += (k ? "," : "") + cells[k];
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const McEstimate& e) {
  nlohmann::ordered_json j;
  j["mean"] = e.mean;
  j["stderr"] = e.std_error;
  j["ci95"] = e.ci95;
  j["samples"] = e.samples;
  j["seed"] = e.seed;
  return j;
}

inline nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["family"] = r.family;
  j["n"] = r.n;
  j["m"] = r.m;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["dist"] = r.dist;
  j["trivial"] = r.trivial;
  j["chevet"] = detail::json_value(r.chevet);
  j["latala"] = r.latala;
  j["log_factor"] = r.log_factor;
  j["rs_corollary"] = r.log_three_halves;
  j["expectation_threshold"] = r.expectation_threshold;
  j["surrogate"] = r.surrogate;
  j["mc_opnorm"] = r.mc_opnorm ? to_json(*r.mc_opnorm) : nlohmann::ordered_json(nullptr);
  j["mc_lower"] = r.mc_lower ? to_json(*r.mc_lower) : nlohmann::ordered_json(nullptr);
  j["ratio_op_lower"] = detail::json_value(r.ratio_op_lower);
  j["ratio_op_logxlower"] = detail::json_value(r.ratio_op_logxlower);
  j["ratio_op_surrogate"] = detail::json_value(r.ratio_op_surrogate);
  j["ratio_lower_surrogate"] = detail::json_value(r.ratio_lower_surrogate);
  return j;
}

inline std::string format_bound_reports_json(const std::vector<BoundReport>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

inline std::string format_bound_reports(const std::vector<BoundReport>& rows, ReportFormat f) {
  return f == ReportFormat::csv ? format_bound_reports_csv(rows) : format_bound_reports_json(rows);
}

inline std::string format_verify_report_csv(const VerifyReport& r) {
  std::string out = "check,subject,n,seed,samples,lhs,rhs,margin,pass,detail\n";
  for (const auto& c : r.checks) {
    out += c.check + "," + detail::csv_quote(c.subject) + "," + std::to_string(c.n) + "," + std::to_string(r.seed) +
           "," + std::to_string(c.samples) + "," + format_real(c.lhs) + "," + format_real(c.rhs) + "," +
           format_real(c.margin()) + "," + (c.passed ? "pass" : "fail") + "," + detail::csv_quote(c.detail) + "\n";
  }
  return out;
}

inline std::string format_verify_report_json(const VerifyReport& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["passed"] = r.passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["check"] = c.check;
    e["subject"] = c.subject;
    e["n"] = c.n;
    e["samples"] = c.samples;
    e["lhs"] = c.lhs;
    e["rhs"] = c.rhs;
    e["margin"] = c.margin();
    e["pass"] = c.passed;
    e["detail"] = c.detail;
    j["checks"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

inline std::string format_verify_report(const VerifyReport& r, ReportFormat f) {
  return f == ReportFormat::csv ? format_verify_report_csv(r) : format_verify_report_json(r);
}

} // namespace rmnorm
