#include "conebeta/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace conebeta::io {

PointCloud read_cloud_csv(const std::string& path, double resolution) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path, 0, 0);
  std::string header;
  if (!std::getline(in, header)) throw CsvError("empty file", 1, 1);
  // header: x0,x1,...
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  const int n = static_cast<int>(cols.size());
  for (int i = 0; i < n; ++i) {
    if (cols[i] != "x" + std::to_string(i))
      throw CsvError("header must be x0,...,x{n-1}", 1, i + 1);
  }
  std::vector<Eigen::VectorXd> pts;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Eigen::VectorXd p(n);
    std::stringstream ss(line);
    std::string tok;
    int col = 0;
    while (std::getline(ss, tok, ',')) {
      if (col >= n) throw CsvError("too many columns", lineno, col + 1);
      try {
        size_t used = 0;
        p[col] = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw CsvError("bad numeric value '" + tok + "'", lineno, col + 1);
      }
      ++col;
    }
    if (col != n) throw CsvError("expected " + std::to_string(n) + " columns", lineno, col + 1);
    pts.push_back(p);
  }
  if (pts.empty()) throw CsvError("no data rows", lineno, 1);

  if (resolution <= 0.0) {
    std::string sidecar = path;
    if (sidecar.size() > 4 && sidecar.substr(sidecar.size() - 4) == ".csv")
      sidecar = sidecar.substr(0, sidecar.size() - 4);
    sidecar += ".json";
    std::ifstream sc(sidecar);
    if (!sc)
      throw CsvError("resolution not given and sidecar " + sidecar + " missing", 0, 0);
    nlohmann::json j;
    sc >> j;
    if (!j.contains("resolution"))
      throw CsvError("sidecar " + sidecar + " lacks a resolution field", 0, 0);
    resolution = j["resolution"].get<double>();
  }

  Eigen::MatrixXd m(n, static_cast<int>(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) m.col(static_cast<int>(i)) = pts[i];
  return PointCloud(n, std::move(m), resolution);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_cloud_csv(const std::string& path, const PointCloud& cloud,
                     const synth::GroundTruth* truth, const std::string& extra_json) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int a = 0; a < cloud.dim(); ++a) out << (a ? "," : "") << "x" << a;
  out << "\n";
  for (int i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < cloud.dim(); ++a)
      out << (a ? "," : "") << format_double(cloud.matrix()(a, i));
    out << "\n";
  }
  std::string sidecar = path;
  if (sidecar.size() > 4 && sidecar.substr(sidecar.size() - 4) == ".csv")
    sidecar = sidecar.substr(0, sidecar.size() - 4);
  sidecar += ".json";
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["resolution"] = cloud.resolution();
  j["n"] = cloud.dim();
  j["count"] = cloud.size();
  if (truth) j["alpha_max"] = truth->alpha_max;
  if (!extra_json.empty()) j["spec"] = nlohmann::json::parse(extra_json);
  std::ofstream sc(sidecar);
  sc << j.dump(2) << "\n";
}

std::string config_hash(const std::string& echo) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : echo) h = (h ^ c) * 1099511628211ULL;
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace conebeta::io
