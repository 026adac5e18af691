#include "fanotrap/levmar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "fanotrap/errors.hpp"

namespace fanotrap {

namespace {

double chi_square_of(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Gaussian elimination with partial pivoting; false on pivot collapse.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return true;
}

}  // namespace

void jacobi_eigendecomposition(std::vector<std::vector<double>> a,
                               std::vector<double>& eigenvalues,
                               std::vector<std::vector<double>>& eigenvectors) {
  const std::size_t n = a.size();
  eigenvectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

  double frob2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) frob2 += a[i][j] * a[i][j];

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off2 += a[i][j] * a[i][j];
    if (off2 <= 1e-28 * frob2) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = eigenvectors[k][p], vkq = eigenvectors[k][q];
          eigenvectors[k][p] = c * vkp - s * vkq;
          eigenvectors[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

std::vector<std::vector<double>> pseudo_inverse_spd(
    const std::vector<std::vector<double>>& matrix, double rel_tolerance) {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  jacobi_eigendecomposition(matrix, eigenvalues, eigenvectors);
  const std::size_t n = matrix.size();
  double max_eval = 0.0;
  for (double e : eigenvalues) max_eval = std::max(max_eval, std::abs(e));
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  if (max_eval == 0.0) return inv;
  for (std::size_t i = 0; i < n; ++i) {
    if (eigenvalues[i] <= rel_tolerance * max_eval) continue;
    const double w = 1.0 / eigenvalues[i];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        inv[r][c] += w * eigenvectors[r][i] * eigenvectors[c][i];
  }
  return inv;
}

LevMarResult levmar_fit(const ResidualFn& fn, std::vector<double> params,
                        std::size_t n_residuals, const LevMarOptions& opt) {
  const std::size_t n = params.size();
  if (n == 0) throw InvalidInputError("levmar: no free parameters");
  if (n_residuals < n)
    throw InvalidInputError("levmar: fewer residuals than parameters");

  std::vector<double> r(n_residuals), r_trial(n_residuals);
  std::vector<double> rp(n_residuals), rm(n_residuals);
  fn(params, r);
  if (r.size() != n_residuals)
    throw InvalidInputError("levmar: residual count mismatch");
  if (!all_finite(r))
    throw InvalidInputError("levmar: residuals not finite at the initial point");
  double chi2 = chi_square_of(r);

  // Rows of jt are dr/dp_j (transposed Jacobian), via central differences.
  std::vector<std::vector<double>> jt(n, std::vector<double>(n_residuals, 0.0));
  auto fill_jacobian = [&](const std::vector<double>& p) {
    std::vector<double> probe = p;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = opt.relative_diff_step * std::max(std::abs(p[j]), 1.0);
      probe[j] = p[j] + h;
      fn(probe, rp);
      probe[j] = p[j] - h;
      fn(probe, rm);
      probe[j] = p[j];
      for (std::size_t i = 0; i < n_residuals; ++i)
        jt[j][i] = (rp[i] - rm[i]) / (2.0 * h);
    }
  };

  double damping = opt.initial_damping;
  bool converged = false;
  int iter = 0;
  for (; iter < opt.max_iterations && !converged; ++iter) {
    fill_jacobian(params);

    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> g(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n_residuals; ++i) s += jt[j][i] * jt[k][i];
        a[j][k] = a[k][j] = s;
      }
      double gs = 0.0;
      for (std::size_t i = 0; i < n_residuals; ++i) gs += jt[j][i] * r[i];
      g[j] = gs;
    }

    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < opt.gradient_tolerance) {
      converged = true;
      break;
    }

    bool stepped = false;
    bool first_solved = true;
    for (int tries = 0; tries < 50; ++tries) {
      std::vector<std::vector<double>> damped = a;
      for (std::size_t j = 0; j < n; ++j)
        damped[j][j] += damping * std::max(a[j][j], 1e-12);
      std::vector<double> rhs(n);
      for (std::size_t j = 0; j < n; ++j) rhs[j] = -g[j];
      std::vector<double> delta;
      if (!solve_linear(damped, rhs, delta)) {
        damping *= 10.0;
        continue;
      }
      std::vector<double> trial(n);
      for (std::size_t j = 0; j < n; ++j) trial[j] = params[j] + delta[j];
      double rel_step = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        rel_step = std::max(rel_step,
                            std::abs(delta[j]) / std::max(std::abs(trial[j]), 1.0));
      fn(trial, r_trial);
      const double chi2_trial = all_finite(r_trial)
                                    ? chi_square_of(r_trial)
                                    : std::numeric_limits<double>::infinity();
      if (chi2_trial < chi2) {
        params = std::move(trial);
        r.swap(r_trial);
        chi2 = chi2_trial;
        damping = std::max(damping / 10.0, 1e-12);
        stepped = true;
        if (rel_step < opt.step_tolerance) converged = true;
        break;
      }
      // No strict descent from the mildly damped system: converged when the
      // proposed step is below tolerance, or when even its model-predicted
      // improvement sits under the rounding floor of the chi^2 sum.
      if (first_solved) {
        double predicted = 0.0;
        for (std::size_t j = 0; j < n; ++j) predicted -= 0.5 * g[j] * delta[j];
        if (rel_step < opt.step_tolerance ||
            predicted <= opt.function_tolerance * chi2) {
          converged = true;
          break;
        }
      }
      first_solved = false;
      damping *= 10.0;
      if (damping > 1e14) break;
    }
    if (!stepped) break;  // converged just above, or stalled at the damping cap
  }

  LevMarResult result;
  result.params = params;
  result.chi_square = chi2;
  result.n_iterations = iter;
  result.converged = converged;

  fill_jacobian(params);
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_residuals; ++i) s += jt[j][i] * jt[k][i];
      a[j][k] = a[k][j] = s;
    }
  result.covariance = pseudo_inverse_spd(a);
  result.standard_errors.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    result.standard_errors[j] = std::sqrt(std::max(result.covariance[j][j], 0.0));
  return result;
}

}  // namespace fanotrap
