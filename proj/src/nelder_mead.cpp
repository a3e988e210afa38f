#include "noonring/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "noonring/rng.hpp"

namespace noonring {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

using Point = std::vector<double>;

class CountedObjective {
 public:
  CountedObjective(const Objective& f, OptimizationResult& result) : f_(f), result_(result) {}

  double operator()(const Point& x) {
    double v = f_(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    ++result_.evaluations;
    if (result_.best_x.empty() || v < result_.best_value) {
      result_.best_value = v;
      result_.best_x = x;
    }
    result_.trace.push_back({result_.evaluations, result_.best_value});
    return v;
  }

 private:
  const Objective& f_;
  OptimizationResult& result_;
};

double step_for(double xi) { return std::max(0.1, 0.1 * std::abs(xi)); }

void run_pass(CountedObjective& f, std::vector<Point> simplex, const NelderMeadOptions& opts) {
  const std::size_t n = simplex.front().size();
  const long budget_end = opts.max_evals;
  long used = 0;
  auto eval = [&](const Point& x) {
    ++used;
    return f(x);
  };

  std::vector<double> values(simplex.size());
  for (std::size_t i = 0; i < simplex.size() && used < budget_end; ++i) values[i] = eval(simplex[i]);
  if (used >= budget_end) return;

  std::vector<std::size_t> order(simplex.size());
  Point centroid(n), trial(n), trial2(n);

  while (used < budget_end) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    {
      std::vector<Point> s2;
      std::vector<double> v2;
      for (auto i : order) {
        s2.push_back(std::move(simplex[i]));
        v2.push_back(values[i]);
      }
      simplex = std::move(s2);
      values = std::move(v2);
    }

    const double spread = values.back() - values.front();
    double extent = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      for (std::size_t k = 0; k < n; ++k) extent = std::max(extent, std::abs(simplex[i][k] - simplex[0][k]));
    if (spread <= opts.ftol || extent <= opts.xtol) return;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
    for (auto& c : centroid) c /= static_cast<double>(n);

    const Point& worst = simplex.back();
    for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + kReflect * (centroid[k] - worst[k]);
    const double fr = eval(trial);

    if (fr < values.front()) {
      for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + kExpand * (trial[k] - centroid[k]);
      const double fe = used < budget_end ? eval(trial2) : std::numeric_limits<double>::infinity();
      if (fe < fr) {
        simplex.back() = trial2;
        values.back() = fe;
      } else {
        simplex.back() = trial;
        values.back() = fr;
      }
      continue;
    }
    if (fr < values[n - 1]) {
      simplex.back() = trial;
      values.back() = fr;
      continue;
    }
    if (used >= budget_end) return;

    bool accepted = false;
    if (fr < values.back()) {
      // outside contraction
      for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + kContract * (trial[k] - centroid[k]);
      const double fc = eval(trial2);
      if (fc <= fr) {
        simplex.back() = trial2;
        values.back() = fc;
        accepted = true;
      }
    } else {
      // inside contraction
      for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + kContract * (worst[k] - centroid[k]);
      const double fc = eval(trial2);
      if (fc < values.back()) {
        simplex.back() = trial2;
        values.back() = fc;
        accepted = true;
      }
    }
    if (accepted) continue;

    for (std::size_t i = 1; i < simplex.size() && used < budget_end; ++i) {
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[0][k] + kShrink * (simplex[i][k] - simplex[0][k]);
      values[i] = eval(simplex[i]);
    }
  }
}

}  // namespace

OptimizationResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts) {
  if (x0.empty()) throw std::invalid_argument("nelder_mead: empty starting point");
  for (double v : x0)
    if (!std::isfinite(v)) throw std::invalid_argument("nelder_mead: non-finite starting point");

  OptimizationResult result;
  result.seed = opts.seed;
  CountedObjective counted(f, result);
  const std::size_t n = x0.size();

  std::vector<Point> simplex{x0};
  for (std::size_t i = 0; i < n; ++i) {
    Point v = x0;
    v[i] += step_for(x0[i]);
    simplex.push_back(std::move(v));
  }
  run_pass(counted, std::move(simplex), opts);

  auto rng = make_rng(opts.seed, "nelder_mead.restart");
  for (int r = 0; r < opts.restarts; ++r) {
    const Point centre = result.best_x;
    std::vector<Point> restart{centre};
    for (std::size_t i = 0; i < n; ++i) {
      Point v = centre;
      const double sign = (rng() & 1) ? 1.0 : -1.0;
      v[i] += sign * uniform(rng, 0.5, 1.5) * step_for(centre[i]);
      restart.push_back(std::move(v));
    }
    run_pass(counted, std::move(restart), opts);
  }
  return result;
}

}  // namespace noonring
