#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "unkadf/errors.hpp"
#include "unkadf/matrix.hpp"

namespace unkadf {

/// Hourly passenger counts for one transport mode: T time steps by N stations.
/// Values are non-negative and finite; rows are in chronological order.
struct DemandMatrix {
  std::vector<std::string> station_ids;
  std::vector<std::string> timestamps;  // empty when the CSV had no time column
  Matrix values;

  int steps() const { return values.rows(); }
  int stations() const { return values.cols(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

}  // namespace detail

/// Reads a demand CSV: header row of station ids, one row per time step.
/// A first header field named "timestamp" marks an optional time column that
/// is carried through but excluded from the value matrix.
inline DemandMatrix load_demand_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw errors::io("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw errors::parse(path + ":1: missing header row");

  std::vector<std::string> header = detail::split_csv_line(line);
  for (auto& f : header) f = detail::trim(f);

  const bool has_timestamp = !header.empty() && header.front() == "timestamp";
  DemandMatrix d;
  d.station_ids.assign(header.begin() + (has_timestamp ? 1 : 0), header.end());
  if (d.station_ids.empty()) throw errors::parse(path + ":1: header has no station columns");

  const std::size_t n = d.station_ids.size();
  const std::size_t expected_fields = n + (has_timestamp ? 1 : 0);
  std::vector<Vec> rows;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != expected_fields) {
      throw errors::parse(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(expected_fields) + " fields, got " +
                          std::to_string(fields.size()));
    }
    if (has_timestamp) d.timestamps.push_back(detail::trim(fields.front()));
    Vec row(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string cell = detail::trim(fields[j + (has_timestamp ? 1 : 0)]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw errors::parse(path + ":" + std::to_string(line_no) + ": bad number '" +
                            cell + "' in column " + d.station_ids[j]);
      }
      if (!std::isfinite(v) || v < 0.0) {
        throw errors::parse(path + ":" + std::to_string(line_no) + ": negative value " +
                            cell + " in column " + d.station_ids[j]);
      }
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw errors::empty_dataset(path + ": no data rows");
  d.values = Matrix::from_rows(rows);
  return d;
}

inline void save_demand_csv(const DemandMatrix& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw errors::io("cannot open " + path + " for writing");

  const bool with_timestamps = !d.timestamps.empty();
  if (with_timestamps) out << "timestamp,";
  for (int j = 0; j < d.stations(); ++j) {
    out << d.station_ids[j] << (j + 1 < d.stations() ? "," : "");
  }
  out << "\n";

  char buf[32];
  for (int t = 0; t < d.steps(); ++t) {
    if (with_timestamps) out << d.timestamps[t] << ",";
    for (int j = 0; j < d.stations(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", d.values(t, j));
      out << buf << (j + 1 < d.stations() ? "," : "");
    }
    out << "\n";
  }
  if (!out) throw errors::io("write failed for " + path);
}

/// Keeps exactly the stations whose fraction of zero entries does not exceed
/// the threshold; a station sitting exactly on the threshold stays.
inline DemandMatrix filter_stations(const DemandMatrix& d, double zero_fraction_threshold) {
  if (!(zero_fraction_threshold > 0.0) || zero_fraction_threshold > 1.0) {
    throw errors::config("zero-fraction threshold must be in (0, 1], got " +
                         std::to_string(zero_fraction_threshold));
  }
  const int t_steps = d.steps();
  std::vector<int> kept;
  for (int j = 0; j < d.stations(); ++j) {
    int zeros = 0;
    for (int t = 0; t < t_steps; ++t) {
      if (d.values(t, j) == 0.0) ++zeros;
    }
    if (static_cast<double>(zeros) / t_steps <= zero_fraction_threshold) kept.push_back(j);
  }
  if (kept.empty()) {
    throw errors::empty_dataset("every station exceeds the zero-demand threshold " +
                                std::to_string(zero_fraction_threshold));
  }

  DemandMatrix out;
  out.timestamps = d.timestamps;
  out.values = Matrix(t_steps, static_cast<int>(kept.size()));
  for (std::size_t jj = 0; jj < kept.size(); ++jj) {
    out.station_ids.push_back(d.station_ids[kept[jj]]);
    for (int t = 0; t < t_steps; ++t) out.values(t, static_cast<int>(jj)) = d.values(t, kept[jj]);
  }
  return out;
}

/// Contiguous row slice [start, start + len), timestamps included.
inline DemandMatrix slice_steps(const DemandMatrix& d, int start, int len) {
  DemandMatrix out;
  out.station_ids = d.station_ids;
  out.values = Matrix(len, d.stations());
  for (int t = 0; t < len; ++t) {
    for (int j = 0; j < d.stations(); ++j) out.values(t, j) = d.values(start + t, j);
    if (!d.timestamps.empty()) out.timestamps.push_back(d.timestamps[start + t]);
  }
  return out;
}

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct DataSplits {
  DemandMatrix train;
  DemandMatrix val;
  DemandMatrix test;
};

/// Chronological three-way split. Train and validation lengths are floored;
/// the remainder goes to test, so the three parts concatenate back to the
/// input. Every part must be long enough to host at least one window.
inline DataSplits chronological_split(const DemandMatrix& d, const SplitFractions& f, int tau) {
  if (!(f.train > 0.0) || !(f.val > 0.0) || !(f.test > 0.0)) {
    throw errors::config("split fractions must all be positive");
  }
  const double sum = f.train + f.val + f.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw errors::config("split fractions must sum to 1, got " + std::to_string(sum));
  }

  const int t_steps = d.steps();
  const int n_train = static_cast<int>(std::floor(t_steps * f.train));
  const int n_val = static_cast<int>(std::floor(t_steps * f.val));
  const int n_test = t_steps - n_train - n_val;

  const int need = tau + 1;
  if (n_train < need || n_val < need || n_test < need) {
    throw errors::insufficient_data(
        "split lengths " + std::to_string(n_train) + "/" + std::to_string(n_val) + "/" +
        std::to_string(n_test) + " cannot host a window of length " + std::to_string(tau));
  }

  return DataSplits{slice_steps(d, 0, n_train), slice_steps(d, n_train, n_val),
                    slice_steps(d, n_train + n_val, n_test)};
}

}  // namespace unkadf
