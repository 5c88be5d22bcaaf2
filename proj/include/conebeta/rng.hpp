#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace conebeta {

/// Deterministic generator with hand-rolled value mapping so that streams do
/// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

  double normal() {
    // Marsaglia polar method.
    for (;;) {
      double u = uniform(-1.0, 1.0), v = uniform(-1.0, 1.0);
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Eigen::VectorXd unit_vector(int n) {
    for (;;) {
      Eigen::VectorXd v = gaussian_vector(n);
      double norm = v.norm();
      if (norm > 1e-12) return v / norm;
    }
  }

  /// Haar-ish random rotation from QR of a Gaussian matrix, det fixed to +1.
  Eigen::MatrixXd rotation(int n) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) g.col(i) = gaussian_vector(n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
  }

 private:
  uint64_t state_;
};

}  // namespace conebeta
