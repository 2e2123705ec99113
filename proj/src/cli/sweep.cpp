#include "qlink/cli/sweep.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "qlink/core/parallel.hpp"

namespace qlink::cli {

Axis linspace_axis(std::string name, double lo, double hi, long n) {
  if (n < 1) throw UsageError("axis '" + name + "' is empty");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw UsageError("axis '" + name + "' has non-finite bounds");
  if (hi < lo) throw UsageError("axis '" + name + "': upper bound below lower bound");
  if (n > 1 && hi == lo) throw UsageError("axis '" + name + "': several points need distinct bounds");
  Axis a{std::move(name), {}};
  for (long k = 0; k < n; ++k) a.values.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (n - 1));
  return a;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string grid_csv(const GridSweep& sweep, const std::vector<std::vector<double>>& values) {
  std::string out = sweep.outer.name + "," + sweep.inner.name + "," + sweep.value_name + "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].empty()) continue;  // row not computed
    for (std::size_t j = 0; j < sweep.inner.values.size(); ++j)
      out += format_double(sweep.outer.values[i]) + "," + format_double(sweep.inner.values[j]) + "," +
             format_double(values[i][j]) + "\n";
  }
  return out;
}

std::vector<std::vector<double>> run_grid(const GridSweep& sweep, int workers, const std::filesystem::path& dir,
                                          const std::string& file) {
  if (sweep.outer.values.empty() || sweep.inner.values.empty()) throw UsageError("sweep has an empty axis");
  std::vector<std::vector<double>> values(sweep.outer.values.size());
  auto write = [&] {
    std::ofstream(dir / file) << grid_csv(sweep, values);
  };
  try {
    parallel_for(values.size(), workers, [&](std::size_t i) {
      auto row = sweep.row(i);
      if (row.size() != sweep.inner.values.size()) throw DimensionError("sweep row has the wrong length");
      values[i] = std::move(row);
    });
  } catch (const SweepFailure& f) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!f.completed()[i]) values[i].clear();
    write();
    nlohmann::json m;
    m["file"] = file;
    m["rows"] = values.size();
    m["outer_axis"] = sweep.outer.name;
    std::vector<std::size_t> done;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (f.completed()[i]) done.push_back(i);
    m["completed_rows"] = done;
    m["failed_row"] = f.failed_index();
    m["error"] = f.what();
    std::ofstream(dir / (file + ".manifest.json")) << m.dump(2) << '\n';
    throw;
  }
  write();
  return values;
}

}  // namespace qlink::cli
