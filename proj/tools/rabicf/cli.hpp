#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "rabi/model.hpp"

namespace rabicf {

enum class Format { Csv, Json };

struct RunConfig {
  rabi::ModelParams model{};
  rabi::Sector sector = rabi::Sector::trivial();
  rabi::Window window{};
  double grid_step = 0.0;  // 0: library default
  double cf_rel_tol = 1e-12;
  double root_abs_tol = 1e-12;
  int oracle_n = 0;        // 0: library default start
  int threads = 1;
  Format format = Format::Csv;
  std::string output;      // empty: stdout
};

/// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_numerical = 2;

/// Parses argv (argv[0] is the program name) and runs one subcommand.
/// Results go to `out` unless --output names a file; diagnostics go to
/// `err` as single lines "error: CODE: message".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rabicf
