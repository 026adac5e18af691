#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fanotrap {

// Generic damped least-squares minimizer for the small (<= 7 parameter)
// problems in this library. Residuals must come back pre-weighted,
// r_i = (model_i - data_i) / sigma_i, so that chi_square = sum r_i^2 and the
// parameter covariance is (J^T J)^-1 with no post-hoc variance scaling.
using ResidualFn =
    std::function<void(const std::vector<double>& params, std::vector<double>& residuals)>;

struct LevMarOptions {
  int max_iterations = 200;
  double initial_damping = 1e-3;
  double step_tolerance = 1e-8;      // relative parameter step below which we stop
  double gradient_tolerance = 1e-10; // max |J^T r| below which we stop
  double relative_diff_step = 1e-6;  // central-difference step, relative to |p|
  // A non-improving step whose model-predicted relative chi^2 reduction falls
  // below this is convergence at the rounding floor of the residual sum.
  double function_tolerance = 1e-10;
};

struct LevMarResult {
  std::vector<double> params;
  std::vector<double> standard_errors;           // sqrt(diag of covariance)
  std::vector<std::vector<double>> covariance;   // pseudo-inverse of J^T J
  double chi_square = 0.0;
  int n_iterations = 0;
  bool converged = false;  // false means the iteration cap or a stall was hit
};

LevMarResult levmar_fit(const ResidualFn& residuals, std::vector<double> initial_params,
                        std::size_t n_residuals, const LevMarOptions& options = {});

// Cyclic Jacobi diagonalization of a real symmetric matrix. Column i of
// eigenvectors pairs with eigenvalues[i]. Shared with the inference module.
void jacobi_eigendecomposition(std::vector<std::vector<double>> matrix,
                               std::vector<double>& eigenvalues,
                               std::vector<std::vector<double>>& eigenvectors);

// Moore-Penrose inverse of a symmetric positive semi-definite matrix;
// eigenvalues below rel_tolerance * max_eigenvalue are treated as null space.
std::vector<std::vector<double>> pseudo_inverse_spd(
    const std::vector<std::vector<double>>& matrix, double rel_tolerance = 1e-12);

}  // namespace fanotrap
