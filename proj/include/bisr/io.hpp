#pragma once

// CSV I/O for signals, filter taps, and sweep reports.  All
// floating-point output uses 17 significant digits.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bisr/experiment.hpp"

namespace bisr {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Two-column CSV: index,value (with header).
inline void write_signal_csv(const std::string& path, std::span<const double> x) {
  std::ofstream out(path);
  if (!out) throw std::domain_error("cannot open for writing: " + path);
  out << "index,value\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out << i + 1 << ',' << format_double(x[i]) << '\n';
}

/// Reads either a single value column or index,value rows; a header
/// line is skipped if present.
inline std::vector<double> read_value_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open: " + path);
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string a, b;
    std::getline(row, a, ',');
    const bool has_second = static_cast<bool>(std::getline(row, b, ','));
    const std::string& cell = has_second ? b : a;
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw std::domain_error(path + ": cannot parse '" + cell + "'");
    }
    first = false;
  }
  if (values.empty()) throw std::domain_error(path + ": no values");
  return values;
}

inline void write_sweep_csv(std::ostream& out, const SweepReport& rep) {
  out << "sigma,method,mean_rmse,mean_ms\n";
  for (const auto& row : rep.rows)
    out << format_double(row.sigma) << ',' << row.method << ','
        << format_double(row.mean_rmse) << ',' << format_double(row.mean_ms) << '\n';
}

inline void write_sweep_table(std::ostream& out, const SweepReport& rep) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-16s %8s %12s %10s", "method", "sigma",
                "mean RMSE", "mean ms");
  out << buf << '\n';
  for (const auto& row : rep.rows) {
    std::snprintf(buf, sizeof(buf), "%-16s %8.3g %12.4f %10.2f",
                  row.method.c_str(), row.sigma, row.mean_rmse, row.mean_ms);
    out << buf << '\n';
  }
}

/// Scatter data for the optimality report: index, x_n, v_n.
inline void write_scatter_csv(std::ostream& out, const OptimalityReport& rep) {
  out << "index,x,v\n";
  for (std::size_t i = 0; i < rep.x.size(); ++i)
    out << i + 1 << ',' << format_double(rep.x[i]) << ',' << format_double(rep.v[i])
        << '\n';
}

}  // namespace bisr
