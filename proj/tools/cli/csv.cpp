#include "cli/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "deadbeat/error.hpp"

namespace deadbeat::cli {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

void append_names(std::vector<std::string>& header, const char* stem,
                  Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) {
    header.push_back(std::string(stem) + "_" + std::to_string(i + 1));
  }
}

void write_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    out << format_number(row[i]);
  }
  out << '\n';
}

void write_header(std::ostream& out, const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out << ',';
    out << header[i];
  }
  out << '\n';
}

void append(std::vector<double>& row, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
}

Eigen::Index width(const std::vector<Vector>& vs) {
  return vs.empty() ? 0 : vs.front().size();
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  std::vector<std::string> header{"t"};
  append_names(header, "x_true", width(trace.x_true));
  append_names(header, "y_true", width(trace.y_true));
  append_names(header, "y_meas", width(trace.y_meas));
  append_names(header, "u", width(trace.u));
  write_header(out, header);
  std::vector<double> row;
  for (std::size_t j = 0; j < trace.size(); ++j) {
    row.clear();
    row.push_back(trace.grid.time(j));
    append(row, trace.x_true[j]);
    append(row, trace.y_true[j]);
    append(row, trace.y_meas[j]);
    append(row, trace.u[j]);
    write_row(out, row);
  }
}

void write_estimate_csv(std::ostream& out, const Trace& trace,
                        const EstimateTrace& estimate) {
  const bool full = !estimate.w.empty() && estimate.w.front().size() > 0;
  std::vector<std::string> header{"t"};
  append_names(header, "x_true", width(trace.x_true));
  append_names(header, "y_true", width(trace.y_true));
  append_names(header, "y_meas", width(trace.y_meas));
  append_names(header, "z", width(estimate.z));
  if (full) append_names(header, "w", width(estimate.w));
  header.emplace_back("reset_flag");
  header.emplace_back("degenerate_flag");
  write_header(out, header);
  std::vector<double> row;
  for (std::size_t j = 0; j < estimate.size(); ++j) {
    row.clear();
    row.push_back(estimate.grid.time(j));
    append(row, trace.x_true[j]);
    append(row, trace.y_true[j]);
    append(row, trace.y_meas[j]);
    append(row, estimate.z[j]);
    if (full) append(row, estimate.w[j]);
    row.push_back(estimate.reset_flag[j]);
    row.push_back(estimate.degenerate_flag[j]);
    write_row(out, row);
  }
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) {
    throw Error(ErrorKind::kLengthMismatch, "header and column count differ");
  }
  write_header(out, header);
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  std::vector<double> row(columns.size());
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t c = 0; c < columns.size(); ++c) row[c] = columns[c].at(j);
    write_row(out, row);
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kInvalidArgument, "CSV has no header");
  }
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      double value = 0.0;
      const auto res =
          std::from_chars(line.data() + start, line.data() + end, value);
      if (res.ec != std::errc() || res.ptr != line.data() + end) {
        throw Error(ErrorKind::kInvalidArgument,
                    "bad CSV number: " + line.substr(start, end - start));
      }
      row.push_back(value);
      start = end + 1;
    }
    if (row.size() != table.header.size()) {
      throw Error(ErrorKind::kLengthMismatch, "CSV row width differs from header");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Trace read_trace_csv(std::istream& in, std::size_t n, std::size_t k,
                     std::size_t m) {
  const CsvTable table = read_csv(in);
  if (table.header.size() != 1 + n + 2 * k + m) {
    throw Error(ErrorKind::kDimensionMismatch, "trace CSV has wrong width");
  }
  Trace trace;
  const std::size_t rows = table.rows.size();
  trace.grid.t0 = rows > 0 ? table.rows[0][0] : 0.0;
  trace.grid.h = rows > 1 ? (table.rows[rows - 1][0] - table.rows[0][0]) /
                                static_cast<double>(rows - 1)
                          : 0.0;
  trace.grid.count = rows;
  auto slice = [](const std::vector<double>& row, std::size_t from,
                  std::size_t len) {
    Vector v(static_cast<Eigen::Index>(len));
    for (std::size_t i = 0; i < len; ++i) {
      v(static_cast<Eigen::Index>(i)) = row[from + i];
    }
    return v;
  };
  for (const auto& row : table.rows) {
    trace.x_true.push_back(slice(row, 1, n));
    trace.y_true.push_back(slice(row, 1 + n, k));
    trace.y_meas.push_back(slice(row, 1 + n + k, k));
    trace.u.push_back(slice(row, 1 + n + 2 * k, m));
  }
  return trace;
}

}  // namespace deadbeat::cli
