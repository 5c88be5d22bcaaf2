#pragma once

#include <string>

#include "conebeta/synth.hpp"
#include "conebeta/types.hpp"

namespace conebeta::io {

struct CsvError : std::runtime_error {
  int line, column;
  CsvError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), column(col_) {}
};

/// Reads a cloud from CSV with header x0,...,x{n-1}, one point per row.
/// resolution < 0 looks for a sidecar <path minus .csv>.json with
/// {"resolution": h}; a missing resolution is a CsvError.
PointCloud read_cloud_csv(const std::string& path, double resolution = -1.0);

/// Writes the cloud CSV plus a sidecar JSON with resolution and, when given,
/// per-point ground-truth labels.
void write_cloud_csv(const std::string& path, const PointCloud& cloud,
                     const synth::GroundTruth* truth = nullptr,
                     const std::string& extra_json = "");

/// Fixed-format double so reports are byte-identical across runs.
std::string format_double(double v);

/// FNV hash of a configuration echo string, carried on every report row.
std::string config_hash(const std::string& echo);

}  // namespace conebeta::io
