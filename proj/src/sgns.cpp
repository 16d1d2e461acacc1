#include "fema/sgns.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fema/matrix.hpp"

namespace fema {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

namespace {

void check_dims(VectorView u, VectorView v_pos, std::span<const VectorView> negs) {
  const auto bad = [&](std::size_t got) {
    return std::invalid_argument("dimension mismatch: expected " + std::to_string(u.size()) +
                                 ", got " + std::to_string(got));
  };
  if (v_pos.size() != u.size()) throw bad(v_pos.size());
  for (const auto& v : negs) {
    if (v.size() != u.size()) throw bad(v.size());
  }
}

}  // namespace

double pair_objective(VectorView u, VectorView v_pos, std::span<const VectorView> negs) {
  check_dims(u, v_pos, negs);
  double value = log_sigmoid(dot(u, v_pos));
  for (const auto& v : negs) value += log_sigmoid(-dot(u, v));
  return value;
}

PairGradients pair_gradients(VectorView u, VectorView v_pos, std::span<const VectorView> negs) {
  check_dims(u, v_pos, negs);
  const std::size_t d = u.size();
  PairGradients g;
  g.u.assign(d, 0.0);
  g.v_pos.assign(d, 0.0);

  // d/dx log s(x) = 1 - s(x); d/dx log s(-x) = -s(x).
  const double pos = 1.0 - sigmoid(dot(u, v_pos));
  axpy(pos, v_pos, g.u);
  axpy(pos, u, g.v_pos);
  g.negs.reserve(negs.size());
  for (const auto& v : negs) {
    const double neg = -sigmoid(dot(u, v));
    axpy(neg, v, g.u);
    auto& gv = g.negs.emplace_back(d, 0.0);
    axpy(neg, u, gv);
  }
  return g;
}

}  // namespace fema
