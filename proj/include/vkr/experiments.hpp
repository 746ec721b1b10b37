#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vkr/config.hpp"
#include "vkr/profile.hpp"
#include "vkr/quadform.hpp"

namespace vkr {

inline constexpr const char* kVersion = "0.1.0";

// Rectangular numeric table with provenance header lines, written as CSV
// with 17 significant digits.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> provenance;

  void add_row(std::initializer_list<double> values) {
    rows.emplace_back(values);
    if (rows.back().size() != columns.size())
      throw Error("ResultTable: row width does not match the header");
  }

  void write_csv(const std::filesystem::path& path) const;
};

// Two-column plain ASCII curve, written atomically.
void write_curve(const std::filesystem::path& path,
                 const std::vector<double>& x, const std::vector<double>& y);

// Profile expression grammar for loads and recovery data, with terms joined
// by '+':  none | const c | poly c0 c1 ... | sine A k | cosine A k |
// parabola A   (sine/cosine use angular frequency 2 pi k / ell; parabola is
// the zero-average A (x^2 - ell^2/12)).
ProfilePtr parse_profile_expr(const std::string& expr, double ell);

struct CommandContext {
  const Config& cfg;
  std::filesystem::path out_dir;
  int threads = 1;
  std::string command;
};

ResultTable cmd_density(const CommandContext& ctx);
ResultTable cmd_alpha(const CommandContext& ctx);
ResultTable cmd_minimize1d(const CommandContext& ctx);
ResultTable cmd_gamma_sweep(const CommandContext& ctx);
ResultTable cmd_recovery(const CommandContext& ctx);
ResultTable cmd_gradcheck(const CommandContext& ctx);

// Entry point used by the CLI: dispatches, writes the manifest, the master
// CSV, and the per-command curve files. Throws on any failed assertion.
ResultTable run_command(const std::string& name, const Config& cfg,
                        const std::filesystem::path& out_dir, int threads);

}  // namespace vkr
