#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "peereval/errors.hpp"
#include "peereval/types.hpp"

namespace testutil {

// Runs f and reports which domain error it threw, if any.
template <typename F>
std::optional<peereval::ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const peereval::PeerEvalError& e) {
    return e.code();
  }
  return std::nullopt;
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Interior simplex point: every share at least `floor`.
inline std::vector<double> random_shares(std::mt19937_64& rng, std::size_t n,
                                         double floor = 1e-3) {
  while (true) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (double& x : v) {
      x = -std::log1p(-uniform01(rng));
      sum += x;
    }
    bool ok = true;
    for (double& x : v) {
      x /= sum;
      if (x < floor) ok = false;
    }
    if (ok) return v;
  }
}

// Random evaluation matrix: nonnegative entries, some zeros, zero diagonal.
inline peereval::EvaluationMatrix random_matrix(std::mt19937_64& rng, std::size_t n,
                                                double zero_probability = 0.15) {
  peereval::EvaluationMatrix A(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      A(i, j) = uniform01(rng) < zero_probability ? 0.0 : 10.0 * uniform01(rng) + 0.01;
    }
  }
  return A;
}

// Random weights with zeros sprinkled in but at least `min_positive` positive.
inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n,
                                          std::size_t min_positive = 3) {
  while (true) {
    std::vector<double> w(n);
    std::size_t positive = 0;
    for (double& x : w) {
      x = uniform01(rng) < 0.25 ? 0.0 : 4.0 * uniform01(rng) + 0.05;
      if (x > 0.0) ++positive;
    }
    if (positive >= min_positive) return w;
  }
}

}  // namespace testutil
