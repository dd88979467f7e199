#pragma once

// Brute-force Wigner-grid quadrature used to check the covariance pathway and
// the closed-form impurity. Nothing here reads the closed form.

#include "tmss/phase_space.hpp"
#include "tmss/tmss_family.hpp"

#include <numbers>
#include <stdexcept>

namespace tmss {

/// Thrown when the grid fails the normalization check.
class UnderResolvedGrid : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two-mode Gaussian Wigner function norm * exp(-z^T P z / 2), P the precision (inverse covariance).
class WignerGaussian {
public:
    WignerGaussian(Eigen::Matrix4d precision, double norm);

    static WignerGaussian from_covariance(const CovarianceMatrix& sigma);

    double operator()(const PhasePoint& z) const;

    const Eigen::Matrix4d& precision() const { return precision_; }
    double norm() const { return norm_; }
    /// Per-axis standard deviations sqrt(diag P^{-1}).
    Eigen::Vector4d axis_std() const;

private:
    Eigen::Matrix4d precision_;
    double norm_;
};

/// The theta-parametrized state written directly as
///   (4/pi^2) exp{-2e^{-2r}[(c eta + s mu)^2 + nu^2] - 2e^{2r}[(c mu - s eta)^2 + xi^2]}.
/// Independent of the covariance constructors.
WignerGaussian theta_tmss_wigner(const TmssParams& params);

/// [1 / (4 pi^2 sqrt det sigma)] exp(-z^T sigma^{-1} z / 2). Throws on a singular covariance.
double wigner_eval(const CovarianceMatrix& sigma, const PhasePoint& z);

/// Uniform midpoint grid centred on 0; axis i spans +/- sigmas * std_i with `points` cells.
struct QuadratureGrid {
    int points = 160;
    double sigmas = 8.0;

    void validate() const;
};

struct QuadratureOptions {
    int threads = 1;
    /// Single-mode purity is prefactor * integral W^2; pi for vacuum variance 1/4.
    /// Exposed as a test hook.
    double purity_prefactor = std::numbers::pi;
    double normalization_tol = 1e-6;
};

/// Everything one sweep over the 4D grid produces.
struct GridIntegrals {
    double normalization = 0.0;
    /// integral over (x1, p1) of M^2, M the (x2, p2)-marginal
    double marginal_square = 0.0;
    /// <z_i z_j>
    Eigen::Matrix4d second_moments = Eigen::Matrix4d::Zero();
};

GridIntegrals integrate_on_grid(const WignerGaussian& w, const QuadratureGrid& grid, int threads = 1);

/// 1 - prefactor * integral M^2 over the (x1, p1) marginal. Throws
/// UnderResolvedGrid when |integral W - 1| exceeds the tolerance.
double quadrature_impurity(const WignerGaussian& w, const QuadratureGrid& grid, const QuadratureOptions& opts = {});
double quadrature_impurity(const TmssParams& params, const QuadratureGrid& grid, const QuadratureOptions& opts = {});

/// Relative error of the grid second moments against theta_tmss_covariance;
/// absolute error where the covariance entry vanishes.
Eigen::Matrix4d moment_check(const TmssParams& params, const QuadratureGrid& grid, const QuadratureOptions& opts = {});

/// quadrature_impurity and moment_check from a single sweep.
struct GridCheck {
    double impurity = 0.0;
    Eigen::Matrix4d moment_errors = Eigen::Matrix4d::Zero();
};
GridCheck grid_check(const TmssParams& params, const QuadratureGrid& grid, const QuadratureOptions& opts = {});

/// The TmssParams entry points reject r above this.
inline constexpr double kMaxOracleSqueezing = 1.0;

/// Entries of theta_tmss_covariance below this magnitude are treated as zeros by moment_check.
inline constexpr double kZeroEntry = 1e-12;

}  // namespace tmss
