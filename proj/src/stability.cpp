#include "herdlab/stability.hpp"

#include <algorithm>
#include <cmath>

#include "herdlab/dynamics.hpp"
#include "herdlab/errors.hpp"

namespace herdlab {

std::pair<std::complex<double>, std::complex<double>> eigenvalues_circular(
    const PursuitParams& params, double r_star) {
    if (!(r_star > 0.0) || r_star >= params.R)
        throw DomainError("eigenvalues_circular requires 0 < r_star < R");
    const double k = params.k;
    const double gap = params.R * params.R - r_star * r_star;
    const double radicand = 9.0 * k * k - 4.0 * params.omega * params.omega * gap * gap * gap;
    const std::complex<double> root = std::sqrt(std::complex<double>(radicand, 0.0));
    const double denom = 2.0 * std::pow(gap, 1.5);
    return {(-k + root) / denom, (-k - root) / denom};
}

MatrixN jacobian_numeric(const VectorField& field, std::span<const double> point, double h) {
    const std::size_t n = point.size();
    double norm = 0.0;
    for (double x : point) norm += x * x;
    norm = std::sqrt(norm);
    const double step = h > 0.0 ? h : std::max(1e-6, 1e-7 * norm);

    MatrixN J(n, n);
    std::vector<double> xp(point.begin(), point.end());
    std::vector<double> xm(point.begin(), point.end());
    std::vector<double> fp(n), fm(n);
    for (std::size_t j = 0; j < n; ++j) {
        xp[j] = point[j] + step;
        xm[j] = point[j] - step;
        field(xp, fp);
        field(xm, fm);
        for (std::size_t i = 0; i < n; ++i)
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (fp[i] - fm[i]) / (2.0 * step);
        xp[j] = point[j];
        xm[j] = point[j];
    }
    return J;
}

StabilityVerdict classify_matrix(const MatrixN& J) {
    StabilityVerdict verdict;
    Eigen::EigenSolver<MatrixN> solver(J);
    const auto& vals = solver.eigenvalues();
    verdict.eigenvalues.reserve(static_cast<std::size_t>(vals.size()));
    double max_re = -std::numeric_limits<double>::infinity();
    bool pos_real = false, neg_real = false;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        const std::complex<double> lam = vals(i);
        verdict.eigenvalues.push_back(lam);
        max_re = std::max(max_re, lam.real());
        if (std::abs(lam.imag()) <= kMarginTol) {
            if (lam.real() > kMarginTol) pos_real = true;
            if (lam.real() < -kMarginTol) neg_real = true;
        }
    }
    verdict.margin = max_re;
    if (max_re < -kMarginTol)
        verdict.cls = StabilityClass::AsymptoticallyStable;
    else if (std::abs(max_re) <= kMarginTol)
        verdict.cls = StabilityClass::Marginal;
    else
        verdict.cls = (pos_real && neg_real) ? StabilityClass::Saddle : StabilityClass::Unstable;
    std::sort(verdict.eigenvalues.begin(), verdict.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real()) return a.real() < b.real();
                  return a.imag() < b.imag();
              });
    return verdict;
}

StabilityVerdict classify(const PursuitParams& params, const Equilibrium& eq, int n_evaders) {
    if (n_evaders < 1) throw DomainError("need at least one evader");
    std::vector<double> point(2 * static_cast<std::size_t>(n_evaders));
    for (int i = 0; i < n_evaders; ++i) {
        point[2 * static_cast<std::size_t>(i)] = eq.r_star;
        point[2 * static_cast<std::size_t>(i) + 1] = eq.psi_star;
    }
    VectorField field = [&params](std::span<const double> y, std::span<double> dy) {
        rhs_rotating_polar(y, params, dy);
    };
    return classify_matrix(jacobian_numeric(field, point));
}

const char* to_string(StabilityClass cls) {
    switch (cls) {
        case StabilityClass::AsymptoticallyStable: return "AsymptoticallyStable";
        case StabilityClass::Saddle: return "Saddle";
        case StabilityClass::Unstable: return "Unstable";
        case StabilityClass::Marginal: return "Marginal";
    }
    return "Unknown";
}

}  // namespace herdlab
