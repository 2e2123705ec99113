#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qlink/core/error.hpp"

namespace qlink::cli {

/// Bad command line or protocol parameters (exit status 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Axis {
  std::string name;  ///< CSV column header, unit included (e.g. "delay_ns")
  std::vector<double> values;
};

/// n evenly spaced values from lo to hi. Throws UsageError for n < 1,
/// non-finite ends, or hi < lo.
Axis linspace_axis(std::string name, double lo, double hi, long n);

/// Shortest round-trip decimal form, so output is byte-stable.
std::string format_double(double v);

/// Two-axis grid evaluated row by row: row(i) returns one value per entry of
/// the inner axis. Rows run on `workers` threads and are written in index
/// order, so the CSV does not depend on the worker count.
struct GridSweep {
  Axis outer, inner;
  std::string value_name;
  std::function<std::vector<double>(std::size_t)> row;
};

/// Long-format CSV (outer, inner, value) of a finished grid.
std::string grid_csv(const GridSweep& sweep, const std::vector<std::vector<double>>& values);

/// Runs the sweep and writes `file` into `dir`. On a failed row the completed
/// rows are written anyway, together with `<file>.manifest.json` naming the
/// completed and failed rows, and the SweepFailure is rethrown.
std::vector<std::vector<double>> run_grid(const GridSweep& sweep, int workers, const std::filesystem::path& dir,
                                          const std::string& file);

}  // namespace qlink::cli
