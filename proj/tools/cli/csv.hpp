#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "deadbeat/observer.hpp"
#include "deadbeat/plant_sim.hpp"

namespace deadbeat::cli {

/// Shortest round-trip text for a double ("%.17g", always '.').
std::string format_number(double value);

/// Columns: t, x_true_i, y_true_i, y_meas_i, u_i.
void write_trace_csv(std::ostream& out, const Trace& trace);

/// Columns: t, x_true_i, y_true_i, y_meas_i, z_i, [w_i,] reset_flag,
/// degenerate_flag.
void write_estimate_csv(std::ostream& out, const Trace& trace,
                        const EstimateTrace& estimate);

/// Generic numeric table with a header row.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& columns);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);

/// Inverse of write_trace_csv given the dimensions n, k, m.
Trace read_trace_csv(std::istream& in, std::size_t n, std::size_t k,
                     std::size_t m);

}  // namespace deadbeat::cli
