#include "tmsm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace tmsm {

namespace {

double safe_eval(const Objective& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

SimplexResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const SimplexOptions& options) {
  const Eigen::Index dim = x0.size();
  const auto n_vertices = static_cast<std::size_t>(dim + 1);
  std::vector<Eigen::VectorXd> simplex(n_vertices, x0);
  std::vector<double> values(n_vertices);
  for (Eigen::Index i = 0; i < dim; ++i) simplex[static_cast<std::size_t>(i + 1)][i] += options.initial_step;

  SimplexResult result;
  for (std::size_t i = 0; i < n_vertices; ++i) values[i] = safe_eval(f, simplex[i]);
  result.evaluations = n_vertices;

  std::vector<std::size_t> order(n_vertices);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
    std::vector<Eigen::VectorXd> s2(n_vertices);
    std::vector<double> v2(n_vertices);
    for (std::size_t i = 0; i < n_vertices; ++i) {
      s2[i] = simplex[order[i]];
      v2[i] = values[order[i]];
    }
    simplex.swap(s2);
    values.swap(v2);
  };

  while (true) {
    sort_simplex();
    double diameter = 0.0;
    for (std::size_t i = 1; i < n_vertices; ++i) {
      diameter = std::max(diameter, (simplex[i] - simplex[0]).lpNorm<Eigen::Infinity>());
    }
    const double spread = values.back() - values.front();
    if (std::isfinite(spread) && spread < options.f_tolerance && diameter < options.x_tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;
    ++result.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i + 1 < n_vertices; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd& worst = simplex.back();
    const Eigen::VectorXd reflected = centroid + (centroid - worst);
    const double f_reflected = safe_eval(f, reflected);
    ++result.evaluations;

    if (f_reflected < values.front()) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - worst);
      const double f_expanded = safe_eval(f, expanded);
      ++result.evaluations;
      if (f_expanded < f_reflected) {
        simplex.back() = expanded;
        values.back() = f_expanded;
      } else {
        simplex.back() = reflected;
        values.back() = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[n_vertices - 2]) {
      simplex.back() = reflected;
      values.back() = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values.back();
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid)) : Eigen::VectorXd(centroid + 0.5 * (worst - centroid));
    const double f_contracted = safe_eval(f, contracted);
    ++result.evaluations;
    if (f_contracted < (outside ? f_reflected : values.back())) {
      simplex.back() = contracted;
      values.back() = f_contracted;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t i = 1; i < n_vertices; ++i) {
      simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
      values[i] = safe_eval(f, simplex[i]);
    }
    result.evaluations += n_vertices - 1;
  }

  result.x = simplex.front();
  result.value = values.front();
  return result;
}

SimplexResult newton_polish(const Objective& f, const Eigen::VectorXd& x0, double f0, std::size_t max_steps,
                            double h) {
  const Eigen::Index dim = x0.size();
  SimplexResult result{x0, f0, 0, 0, false};
  for (std::size_t step = 0; step < max_steps; ++step) {
    Eigen::VectorXd grad(dim);
    Eigen::MatrixXd hess(dim, dim);
    const Eigen::VectorXd x = result.x;
    const double fx = result.value;
    for (Eigen::Index i = 0; i < dim; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fp = safe_eval(f, xp), fm = safe_eval(f, xm);
      result.evaluations += 2;
      grad[i] = (fp - fm) / (2 * h);
      hess(i, i) = (fp - 2 * fx + fm) / (h * h);
      for (Eigen::Index j = 0; j < i; ++j) {
        Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += h; xpp[j] += h;
        xpm[i] += h; xpm[j] -= h;
        xmp[i] -= h; xmp[j] += h;
        xmm[i] -= h; xmm[j] -= h;
        hess(i, j) = hess(j, i) =
            (safe_eval(f, xpp) - safe_eval(f, xpm) - safe_eval(f, xmp) + safe_eval(f, xmm)) / (4 * h * h);
        result.evaluations += 4;
      }
    }
    if (!grad.allFinite() || !hess.allFinite()) break;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    Eigen::VectorXd direction = -ldlt.solve(grad);
    if (!direction.allFinite()) break;
    bool improved = false;
    for (double t = 1.0; t > 1e-4; t *= 0.5) {
      const Eigen::VectorXd candidate = x + t * direction;
      const double fc = safe_eval(f, candidate);
      ++result.evaluations;
      if (fc < fx) {
        result.x = candidate;
        result.value = fc;
        improved = true;
        break;
      }
    }
    ++result.iterations;
    if (!improved) break;
    if ((result.x - x).lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return result;
}

SimplexResult minimize(const Objective& f, const Eigen::VectorXd& x0, const SimplexOptions& options) {
  SimplexResult nm = nelder_mead(f, x0, options);
  if (!options.polish || !std::isfinite(nm.value)) return nm;
  const SimplexResult polished = newton_polish(f, nm.x, nm.value);
  nm.evaluations += polished.evaluations;
  nm.iterations += polished.iterations;
  nm.x = polished.x;
  nm.value = polished.value;
  return nm;
}

}  // namespace tmsm
