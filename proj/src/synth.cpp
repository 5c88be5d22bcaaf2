#include "conebeta/synth.hpp"

#include <cmath>

#include "conebeta/rng.hpp"

namespace conebeta::synth {

Family family_from_name(const std::string& name) {
  if (name == "plane") return Family::plane;
  if (name == "lipschitz_graph" || name == "lipschitz") return Family::lipschitz_graph;
  if (name == "cusp_graph" || name == "cusp") return Family::cusp_graph;
  if (name == "cantor4" || name == "cantor") return Family::cantor4;
  if (name == "koch") return Family::koch;
  if (name == "spiral") return Family::spiral;
  if (name == "two_lines") return Family::two_lines;
  throw std::invalid_argument("unknown synth family: " + name);
}

const char* family_name(Family f) {
  switch (f) {
    case Family::plane: return "plane";
    case Family::lipschitz_graph: return "lipschitz_graph";
    case Family::cusp_graph: return "cusp_graph";
    case Family::cantor4: return "cantor4";
    case Family::koch: return "koch";
    case Family::spiral: return "spiral";
    case Family::two_lines: return "two_lines";
  }
  return "?";
}

namespace {

struct Raw {
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> alpha_max;
  double resolution = 0.0;
};

Eigen::VectorXd embed(int n, std::initializer_list<double> coords) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  int i = 0;
  for (double c : coords) v[i++] = c;
  return v;
}

int grid_side(int count, int d) {
  int g = std::max(2, static_cast<int>(std::floor(std::pow(double(count), 1.0 / d))));
  return g;
}

Raw gen_plane(const SynthSpec& s) {
  Raw raw;
  const int g = grid_side(s.sample_count, s.d);
  const double step = 1.0 / (g - 1);
  std::vector<int> idx(s.d, 0);
  for (;;) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(s.n);
    for (int a = 0; a < s.d; ++a) p[a] = idx[a] * step;
    raw.pts.push_back(p);
    raw.alpha_max.push_back(1.0);
    int a = 0;
    while (a < s.d && ++idx[a] == g) idx[a++] = 0;
    if (a == s.d) break;
  }
  raw.resolution = std::sqrt(double(s.d)) * step / 2.0;
  return raw;
}

Raw gen_lipschitz(const SynthSpec& s) {
  Raw raw;
  const int m = std::max(s.sample_count, 8);
  const int pieces = static_cast<int>(s.slopes.size());
  double max_slope = 0.0;
  for (double sl : s.slopes) max_slope = std::max(max_slope, std::abs(sl));
  const double step = 1.0 / (m - 1);
  // piecewise-linear graph over [0,1], continuous, equal-width pieces
  auto eval = [&](double t) {
    double y = 0.0;
    double w = 1.0 / pieces;
    for (int j = 0; j < pieces; ++j) {
      double lo = j * w, hi = (j + 1) * w;
      if (t >= hi) {
        y += s.slopes[j] * w;
      } else {
        y += s.slopes[j] * (t - lo);
        break;
      }
    }
    return y;
  };
  for (int i = 0; i < m; ++i) {
    double t = i * step;
    raw.pts.push_back(embed(s.n, {t, eval(t)}));
    bool corner = false;
    for (int j = 1; j < pieces; ++j) {
      double b = double(j) / pieces;
      if (std::abs(t - b) < step * 1e-9 && s.slopes[j] != s.slopes[j - 1]) corner = true;
    }
    raw.alpha_max.push_back(corner ? -1.0 : 1.0);
  }
  raw.resolution = step / 2.0 * std::sqrt(1.0 + max_slope * max_slope);
  return raw;
}

Raw gen_cusp(const SynthSpec& s) {
  Raw raw;
  int m = std::max(s.sample_count, 9);
  if (m % 2 == 0) ++m;  // keep t = 0 on the grid
  const double step = 2.0 / (m - 1);
  for (int i = 0; i < m; ++i) {
    double t = -1.0 + i * step;
    if (std::abs(t) < step * 0.5) t = 0.0;
    raw.pts.push_back(embed(s.n, {t, std::pow(std::abs(t), 1.0 + s.alpha0)}));
    raw.alpha_max.push_back(t == 0.0 ? s.alpha0 : 1.0);
  }
  double max_slope = 1.0 + s.alpha0;
  raw.resolution = step / 2.0 * std::sqrt(1.0 + max_slope * max_slope);
  return raw;
}

Raw gen_cantor(const SynthSpec& s) {
  Raw raw;
  std::vector<Eigen::Vector2d> corners{{0.0, 0.0}};
  double side = 1.0;
  for (int k = 0; k < s.depth; ++k) {
    side /= 4.0;
    std::vector<Eigen::Vector2d> next;
    next.reserve(corners.size() * 4);
    for (const auto& c : corners) {
      next.push_back(c);
      next.push_back(c + Eigen::Vector2d(3 * side, 0));
      next.push_back(c + Eigen::Vector2d(0, 3 * side));
      next.push_back(c + Eigen::Vector2d(3 * side, 3 * side));
    }
    corners = std::move(next);
  }
  for (const auto& c : corners) {
    raw.pts.push_back(embed(s.n, {c.x() + side / 2.0, c.y() + side / 2.0}));
    raw.alpha_max.push_back(-1.0);
  }
  raw.resolution = side * std::sqrt(2.0) / 2.0;
  return raw;
}

Raw gen_koch(const SynthSpec& s) {
  Raw raw;
  const double theta = s.angle;
  const double scale = 1.0 / (2.0 * (1.0 + std::cos(theta)));
  std::vector<Eigen::Vector2d> pts{{0.0, 0.0}, {1.0, 0.0}};
  for (int k = 0; k < s.depth; ++k) {
    std::vector<Eigen::Vector2d> next;
    next.reserve(pts.size() * 4);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      Eigen::Vector2d a = pts[i], b = pts[i + 1], u = b - a;
      Eigen::Vector2d p1 = a + u * scale;
      Eigen::Vector2d rot(u.x() * std::cos(theta) - u.y() * std::sin(theta),
                          u.x() * std::sin(theta) + u.y() * std::cos(theta));
      Eigen::Vector2d apex = p1 + rot * scale;
      Eigen::Vector2d p2 = b - u * scale;
      next.push_back(a);
      next.push_back(p1);
      next.push_back(apex);
      next.push_back(p2);
    }
    next.push_back(pts.back());
    pts = std::move(next);
  }
  for (const auto& p : pts) {
    raw.pts.push_back(embed(s.n, {p.x(), p.y()}));
    raw.alpha_max.push_back(s.angle > 0.0 ? -1.0 : 1.0);
  }
  raw.resolution = std::pow(scale, s.depth);
  return raw;
}

Raw gen_spiral(const SynthSpec& s) {
  Raw raw;
  const int m = std::max(s.sample_count, 16);
  const double r_stop = 1e-3;
  const double phi_max = std::log(1.0 / r_stop) / s.rate;
  const double dphi = phi_max / (m - 2);
  raw.pts.push_back(embed(s.n, {0.0, 0.0}));  // accumulation point first
  raw.alpha_max.push_back(-1.0);
  for (int i = 0; i <= m - 2; ++i) {
    double phi = i * dphi;
    double r = std::exp(-s.rate * phi);
    raw.pts.push_back(embed(s.n, {r * std::cos(phi), r * std::sin(phi)}));
    raw.alpha_max.push_back(1.0);
  }
  double chord = std::sqrt(1.0 + s.rate * s.rate) * dphi;  // widest gap, at radius 1
  raw.resolution = std::max(chord / 2.0, r_stop);
  return raw;
}

Raw gen_two_lines(const SynthSpec& s) {
  Raw raw;
  int per = std::max(s.sample_count / 2, 8);
  if (per % 2 == 0) ++per;  // keep the crossing on both grids
  const double step = 2.0 / (per - 1);
  Eigen::Vector2d u1(1.0, 0.0), u2(std::cos(s.cross_angle), std::sin(s.cross_angle));
  for (int line = 0; line < 2; ++line) {
    Eigen::Vector2d u = line == 0 ? u1 : u2;
    for (int i = 0; i < per; ++i) {
      double t = -1.0 + i * step;
      if (std::abs(t) < step * 0.5) t = 0.0;
      if (line == 1 && t == 0.0) continue;  // crossing sampled once
      raw.pts.push_back(embed(s.n, {t * u.x(), t * u.y()}));
      raw.alpha_max.push_back(t == 0.0 ? -1.0 : 1.0);
    }
  }
  raw.resolution = step / 2.0;
  return raw;
}

Raw raw_of(const SynthSpec& s) {
  if (s.n < 2) throw std::invalid_argument("synth: need n >= 2");
  if (s.d < 1 || s.d >= s.n) throw std::invalid_argument("synth: need 1 <= d < n");
  if (s.sample_count < s.d + 2) throw std::invalid_argument("synth: sample_count >= d+2");
  switch (s.family) {
    case Family::plane: return gen_plane(s);
    case Family::lipschitz_graph: return gen_lipschitz(s);
    case Family::cusp_graph: return gen_cusp(s);
    case Family::cantor4: return gen_cantor(s);
    case Family::koch: return gen_koch(s);
    case Family::spiral: return gen_spiral(s);
    case Family::two_lines: return gen_two_lines(s);
  }
  throw std::logic_error("synth: unreachable");
}

}  // namespace

double resolution_of(const SynthSpec& spec) {
  Raw raw = raw_of(spec);
  double noise = std::min(spec.noise, raw.resolution / 4.0);
  return raw.resolution + noise;
}

Generated generate(const SynthSpec& spec) {
  Raw raw = raw_of(spec);
  const double noise = std::min(spec.noise, raw.resolution / 4.0);
  Rng rng(spec.seed);
  Eigen::MatrixXd pts(spec.n, static_cast<int>(raw.pts.size()));
  for (size_t i = 0; i < raw.pts.size(); ++i) {
    Eigen::VectorXd p = raw.pts[i];
    if (noise > 0.0) p += rng.unit_vector(spec.n) * (noise * rng.uniform());
    pts.col(static_cast<int>(i)) = p;
  }
  Generated out{PointCloud(spec.n, std::move(pts), raw.resolution + noise),
                GroundTruth{std::move(raw.alpha_max)}};
  return out;
}

}  // namespace conebeta::synth
