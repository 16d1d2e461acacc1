#pragma once

#include <span>
#include <vector>

namespace fema {

// Overflow-free for any finite x.
double sigmoid(double x);
// log(sigmoid(x)) without cancellation: -log1p(exp(-x)) for x >= 0.
double log_sigmoid(double x);

using VectorView = std::span<const double>;

// One sampled (t, t') term of the negative-sampling objective:
//   log s(u.v_pos) + sum_j log s(-u.v_j)
// Always <= 0. Throws std::invalid_argument on dimension mismatch.
double pair_objective(VectorView u, VectorView v_pos, std::span<const VectorView> negs);

struct PairGradients {
  std::vector<double> u;
  std::vector<double> v_pos;
  std::vector<std::vector<double>> negs;
};

// Ascent direction of pair_objective with respect to every argument.
PairGradients pair_gradients(VectorView u, VectorView v_pos, std::span<const VectorView> negs);

}  // namespace fema
