#pragma once

#include "conebeta/types.hpp"

namespace conebeta::synth {

enum class Family { plane, lipschitz_graph, cusp_graph, cantor4, koch, spiral, two_lines };

Family family_from_name(const std::string& name);
const char* family_name(Family f);

struct SynthSpec {
  Family family = Family::plane;
  int n = 2;              // ambient dimension
  int d = 1;              // intrinsic dimension (plane only; graphs are d = 1)
  int sample_count = 500; // grid families round down to their natural count
  double noise = 0.0;     // bounded by h/4
  uint64_t seed = 1;

  // family knobs
  double alpha0 = 0.5;               // cusp_graph exponent offset: |t|^(1+alpha0)
  std::vector<double> slopes{0.8, -0.6, 0.3, -0.9};  // lipschitz_graph pieces
  int depth = 4;                     // cantor4 / koch
  double angle = 1.0471975511965976; // koch bend (radians)
  double rate = 0.35;                // spiral decay per radian
  double cross_angle = 1.0471975511965976;  // two_lines
};

/// Per-point labels: a point is a cone point iff alpha_max >= 0 and an
/// alpha-paraboloid point iff alpha <= alpha_max.
struct GroundTruth {
  std::vector<double> alpha_max;
  bool cone(int i) const { return alpha_max[i] >= 0.0; }
  bool paraboloid(int i, double alpha) const { return alpha <= alpha_max[i]; }
};

struct Generated {
  PointCloud cloud;
  GroundTruth truth;
};

Generated generate(const SynthSpec& spec);

/// Closed-form covering radius of the generated sample w.r.t. the ideal set.
double resolution_of(const SynthSpec& spec);

}  // namespace conebeta::synth
