#pragma once

#include <random>

#include "degen/linalg.hpp"
#include "degen/weighted_time.hpp"

namespace testutil {

inline degen::Matrix random_matrix(degen::Index rows, degen::Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  degen::Matrix m(rows, cols);
  for (degen::Index j = 0; j < cols; ++j)
    for (degen::Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline degen::Vector random_vector(degen::Index n, unsigned seed) { return random_matrix(n, 1, seed).col(0); }

inline degen::TimeSignal random_signal(const degen::TimeGrid& g, degen::Index dim, unsigned seed) {
  return degen::TimeSignal(g, random_matrix(dim, g.nodes(), seed));
}

inline degen::TimeSignal constant_signal(const degen::TimeGrid& g, degen::Index dim, double value) {
  return degen::TimeSignal(g, degen::Matrix::Constant(dim, g.nodes(), value));
}

}  // namespace testutil
