#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace noonring {

struct NelderMeadOptions {
  long max_evals = 2000;  // per pass
  double xtol = 1e-10;    // simplex extent (max-norm distance to best vertex)
  double ftol = 1e-12;    // spread of vertex values
  int restarts = 3;       // passes after the first, each around the incumbent
  std::uint64_t seed = 0;
};

struct TracePoint {
  long evaluation = 0;
  double best = 0.0;
};

struct OptimizationResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  long evaluations = 0;
  std::vector<TracePoint> trace;  // best-so-far after every evaluation
  std::uint64_t seed = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Simplex minimization with reflection 1, expansion 2, contraction 1/2 and
/// shrink 1/2. The first simplex is x0 plus coordinate steps of
/// max(0.1, 0.1|x0_i|); restarts rebuild it around the incumbent with
/// seeded random step sizes and signs. Non-finite values count as +inf.
/// Deterministic for a given seed.
OptimizationResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace noonring
