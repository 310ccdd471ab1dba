#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "herdlab/equilibria.hpp"
#include "herdlab/model.hpp"

namespace herdlab {

using Matrix2 = Eigen::Matrix2d;
using MatrixN = Eigen::MatrixXd;

/// Autonomous vector field y -> f(y) used for numeric differentiation.
using VectorField = std::function<void(std::span<const double>, std::span<double>)>;

/// |max Re(lambda)| below this is classified Marginal (below numeric
/// eigenvalue accuracy).
inline constexpr double kMarginTol = 1e-8;

/// Closed-form circular-mode eigenvalues
///   lambda_{1,2} = (-k +- sqrt(9 k^2 - 4 omega^2 (R^2 - r*^2)^3)) / (2 (R^2 - r*^2)^{3/2});
/// a complex pair when the radicand is negative. Throws DomainError unless
/// 0 < r_star < R.
std::pair<std::complex<double>, std::complex<double>> eigenvalues_circular(
    const PursuitParams& params, double r_star);

/// Central-difference Jacobian, entry error O(h^2). h <= 0 selects
/// max(1e-6, 1e-7 * ||point||) per coordinate.
MatrixN jacobian_numeric(const VectorField& field, std::span<const double> point,
                         double h = 0.0);

enum class StabilityClass { AsymptoticallyStable, Saddle, Unstable, Marginal };

struct StabilityVerdict {
    std::vector<std::complex<double>> eigenvalues;
    StabilityClass cls = StabilityClass::Marginal;
    double margin = 0.0;  // max real part
};

/// Eigenvalue classification of a real matrix.
StabilityVerdict classify_matrix(const MatrixN& J);

/// Builds the coupled 2n x 2n Jacobian of the rotating-polar system at the
/// shared equilibrium (rows of evader i >= 1 depend on evaders i and 0 only)
/// and classifies it by eigenvalue real parts.
StabilityVerdict classify(const PursuitParams& params, const Equilibrium& eq, int n_evaders);

const char* to_string(StabilityClass cls);

}  // namespace herdlab
