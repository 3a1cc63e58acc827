// rmnorm: bound evaluation, Monte Carlo verification and sweeps for
// structured Gaussian matrices.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmnorm/rmnorm.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::vector<std::string>> families;
  std::optional<std::vector<std::size_t>> sizes;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--samples", o.samples, "Monte Carlo samples per expectation");
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--families", o.families, "comma-separated ensemble names")->delimiter(',');
  cmd->add_option("--sizes", o.sizes, "comma-separated sizes")->delimiter(',');
}

rmnorm::ExperimentConfig resolve(const Overrides& o) {
  rmnorm::ExperimentConfig c = o.config_path.empty() ? rmnorm::ExperimentConfig{} : rmnorm::load_config(o.config_path);
  if (o.seed)
    c.seed = *o.seed;
  if (o.samples)
    c.samples = *o.samples;
  if (o.out)
    c.out = *o.out;
  if (o.format)
    c.format = rmnorm::parse_report_format(*o.format);
  if (o.families) {
    c.families.clear();
    for (const auto& f : *o.families)
      if (!f.empty())
        c.families.push_back(f);
  }
  if (o.sizes)
    c.sizes = *o.sizes;
  rmnorm::validate(c);
  return c;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text << std::flush;
  else
    rmnorm::write_text_file_atomic(out, text);
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string cell = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size() || !std::isfinite(x))
      throw rmnorm::ConfigError(std::string(what) + ": not a number: '" + cell + "'");
    v.push_back(x);
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return v;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Norm bounds and Monte Carlo checks for structured Gaussian matrices"};
  app.require_subcommand(1);

  Overrides bounds_o, verify_o, sweep_o;
  auto* bounds = app.add_subcommand("bounds", "closed-form bounds for each matrix");
  add_common(bounds, bounds_o);
  auto* verify = app.add_subcommand("verify", "explicit-constant checks; exit 1 on any failure");
  add_common(verify, verify_o);
  auto* sweep = app.add_subcommand("sweep", "bounds plus Monte Carlo estimates and ratios");
  add_common(sweep, sweep_o);

  std::string fn_spec;
  std::string vector_text;
  std::string row_text;
  double tol = rmnorm::default_orlicz_rel_tol;
  auto* orlicz = app.add_subcommand("orlicz", "Orlicz norm of a vector");
  orlicz->add_option("--function", fn_spec, "power:P, diag-gauss, row-profile or column-profile")->required();
  orlicz->add_option("--vector", vector_text, "comma-separated entries")->required();
  orlicz->add_option("--row", row_text, "coefficients for row-profile / column-profile");
  orlicz->add_option("--rel-tol", tol, "relative tolerance of the gauge");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (*bounds) {
      const auto c = resolve(bounds_o);
      emit(rmnorm::format_bound_reports(rmnorm::cmd_bounds(c), c.format), c.out);
    } else if (*sweep) {
      const auto c = resolve(sweep_o);
      emit(rmnorm::format_bound_reports(rmnorm::cmd_sweep(c), c.format), c.out);
    } else if (*verify) {
      const auto c = resolve(verify_o);
      const auto rep = rmnorm::cmd_verify(c);
      emit(rmnorm::format_verify_report(rep, c.format), c.out);
      std::size_t failed = 0;
      for (const auto& chk : rep.checks)
        if (!chk.passed) {
          ++failed;
          std::cerr << "FAIL " << chk.check << " [" << chk.subject << "] lhs=" << rmnorm::format_real(chk.lhs)
                    << " rhs=" << rmnorm::format_real(chk.rhs) << "\n";
        }
      std::cerr << rep.checks.size() - failed << "/" << rep.checks.size() << " checks passed\n";
      return failed == 0 ? exit_ok : exit_failure;
    } else if (*orlicz) {
      const auto x = parse_list(vector_text, "--vector");
      const auto row = row_text.empty() ? std::vector<double>{} : parse_list(row_text, "--row");
      const auto fn = rmnorm::parse_orlicz_function(fn_spec, row);
      if (!(tol > 0.0))
        throw rmnorm::ConfigError("--rel-tol must be positive");
      std::cout << rmnorm::format_real(rmnorm::orlicz_norm(fn, x, tol)) << "\n";
    }
  } catch (const rmnorm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const rmnorm::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_ok;
}
