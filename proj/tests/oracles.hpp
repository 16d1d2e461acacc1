#pragma once

// Reference computations used only by tests. Nothing here calls into the
// library's numeric code paths.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace fema::oracle {

// Direct long double evaluation of log(1 / (1 + e^-x)); accurate for |x| < ~40.
inline long double log_sigmoid(long double x) { return -std::log(1.0L + std::exp(-x)); }

inline long double dot(std::span<const double> a, std::span<const double> b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

inline long double pair_objective(std::span<const double> u, std::span<const double> v_pos,
                                  const std::vector<std::vector<double>>& negs) {
  long double value = log_sigmoid(dot(u, v_pos));
  for (const auto& v : negs) value += log_sigmoid(-dot(u, v));
  return value;
}

// (f(x + h r) - f(x - h r)) / 2h
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x, const std::vector<double>& r,
                                 double h) {
  std::vector<double> plus = x, minus = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] += h * r[i];
    minus[i] -= h * r[i];
  }
  return (f(plus) - f(minus)) / (2 * h);
}

inline std::vector<double> gaussian_vector(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

// Upper-tail p-value of Pearson's chi-square statistic.
inline double chi_square_p_value(std::span<const std::size_t> observed,
                                 std::span<const double> probabilities) {
  std::size_t n = 0;
  for (const auto o : observed) n += o;
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probabilities[i] * static_cast<double>(n);
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace fema::oracle
