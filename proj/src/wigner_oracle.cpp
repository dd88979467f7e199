#include "tmss/wigner_oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

namespace tmss {

namespace {

constexpr double kPi = std::numbers::pi;
// The integrand peaks at exponent 0. Lines whose maximum lies below this are
// dropped: even 160^4 such points add < 1e-17 to sums of order >= 1.
constexpr double kNegligibleExponent = -60.0;
// Walking away from a line's peak, stop once the term is this small relative
// to the running sum and the ratio is below 1/2 (geometric tail bound).
constexpr double kTailCutoff = 1e-18;

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Per x1-row partial sums of one sweep. Kept per row so the final reduction
// order depends only on the grid, not on the thread layout.
struct RowSums {
    double marginal = 0.0;
    double marginal_sq = 0.0;
    std::array<double, 10> moments{};
};

constexpr std::array<std::pair<int, int>, 10> kMomentIndex{
    {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

class GridSweep {
public:
    GridSweep(const WignerGaussian& w, const QuadratureGrid& grid) : p_(w.precision()), n_(grid.points) {
        const Eigen::Vector4d sd = w.axis_std();
        for (int ax = 0; ax < 4; ++ax) {
            half_[ax] = grid.sigmas * sd[ax];
            step_[ax] = 2.0 * half_[ax] / n_;
        }
    }

    double coord(int ax, int i) const { return -half_[ax] + (i + 0.5) * step_[ax]; }
    double step(int ax) const { return step_[ax]; }

    RowSums row(int a) const {
        RowSums out;
        const double x1 = coord(0, a);
        const double h3 = step_[3];
        const double p33 = p_(3, 3);
        const double kappa = std::exp(-p33 * h3 * h3);
        for (int b = 0; b < n_; ++b) {
            const double p1 = coord(1, b);
            double t0 = 0, tx = 0, txx = 0, u1 = 0, ux = 0, u2 = 0;
            for (int c = 0; c < n_; ++c) {
                const double x2 = coord(2, c);
                const double lin = p_(3, 0) * x1 + p_(3, 1) * p1 + p_(3, 2) * x2;
                const double q0 = -0.5 * (p_(0, 0) * x1 * x1 + p_(1, 1) * p1 * p1 + p_(2, 2) * x2 * x2) -
                                  (p_(0, 1) * x1 * p1 + p_(0, 2) * x1 * x2 + p_(1, 2) * p1 * x2);
                auto exponent = [&](double t) { return q0 - lin * t - 0.5 * p33 * t * t; };

                // exp along the p2 line is generated by a multiplicative recurrence
                // started at the grid point nearest the line's maximum
                const double peak = -lin / p33;
                const int d0 = std::clamp(static_cast<int>(std::lround((peak + half_[3]) / h3 - 0.5)), 0, n_ - 1);
                const double td0 = coord(3, d0);
                const double q_peak = exponent(td0);
                if (q_peak < kNegligibleExponent) {
                    continue;
                }
                const double e0 = std::exp(q_peak);
                double s0 = 0, s1 = 0, s2 = 0;

                double v = e0;
                double ratio = std::exp(-h3 * lin - p33 * h3 * (td0 + 0.5 * h3));
                for (int d = d0; d < n_; ++d) {
                    const double t = coord(3, d);
                    s0 += v;
                    s1 += v * t;
                    s2 += v * t * t;
                    v *= ratio;
                    ratio *= kappa;
                    if (ratio < 0.5 && v < kTailCutoff * s0) break;
                }
                ratio = std::exp(h3 * lin + p33 * h3 * (td0 - 0.5 * h3));
                v = e0 * ratio;
                for (int d = d0 - 1; d >= 0; --d) {
                    const double t = coord(3, d);
                    s0 += v;
                    s1 += v * t;
                    s2 += v * t * t;
                    ratio *= kappa;
                    v *= ratio;
                    if (ratio < 0.5 && v < kTailCutoff * s0) break;
                }

                t0 += s0;
                tx += x2 * s0;
                txx += x2 * x2 * s0;
                u1 += s1;
                ux += x2 * s1;
                u2 += s2;
            }
            const double m = t0 * step_[2] * step_[3];
            out.marginal += m;
            out.marginal_sq += m * m;
            const std::array<double, 10> mom{x1 * x1 * t0, x1 * p1 * t0, x1 * tx, x1 * u1, p1 * p1 * t0,
                                             p1 * tx,      p1 * u1,      txx,     ux,      u2};
            for (std::size_t k = 0; k < mom.size(); ++k) {
                out.moments[k] += mom[k];
            }
        }
        return out;
    }

private:
    Eigen::Matrix4d p_;
    int n_;
    std::array<double, 4> half_{};
    std::array<double, 4> step_{};
};

}  // namespace

WignerGaussian::WignerGaussian(Eigen::Matrix4d precision, double norm) : precision_(std::move(precision)), norm_(norm) {
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("Wigner normalization must be positive and finite");
    }
    if ((precision_ - precision_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * precision_.cwiseAbs().maxCoeff()) {
        throw std::invalid_argument("Wigner precision matrix is not symmetric");
    }
    precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
    if (precision_.llt().info() != Eigen::Success) {
        throw std::invalid_argument("Wigner precision matrix is not positive definite");
    }
}

WignerGaussian WignerGaussian::from_covariance(const CovarianceMatrix& sigma) {
    if (sigma.dim() != 4) {
        throw std::invalid_argument("WignerGaussian needs a two-mode covariance");
    }
    const Eigen::Matrix4d s = sigma.matrix();
    const double det = s.determinant();
    if (!(det > 0.0)) {
        throw std::domain_error("singular covariance has no Wigner density");
    }
    return WignerGaussian(s.inverse(), 1.0 / (4.0 * kPi * kPi * std::sqrt(det)));
}

double WignerGaussian::operator()(const PhasePoint& z) const {
    return norm_ * std::exp(-0.5 * z.dot(precision_ * z));
}

Eigen::Vector4d WignerGaussian::axis_std() const {
    return precision_.inverse().diagonal().cwiseSqrt();
}

WignerGaussian theta_tmss_wigner(const TmssParams& params) {
    const double r = params.r();
    const double c = std::cos(params.theta());
    const double s = std::sin(params.theta());
    const double h = 1.0 / std::sqrt(2.0);
    // lab-coordinate coefficients of the collective quadratures
    const Eigen::Vector4d xi(h, 0, -h, 0);
    const Eigen::Vector4d nu(0, h, 0, -h);
    const Eigen::Vector4d eta(h, 0, h, 0);
    const Eigen::Vector4d mu(0, h, 0, h);

    const double anti = std::exp(-2.0 * r);
    const double sq = std::exp(2.0 * r);
    const std::array<std::pair<double, Eigen::Vector4d>, 4> terms{{
        {anti, c * eta + s * mu},
        {anti, nu},
        {sq, c * mu - s * eta},
        {sq, xi},
    }};
    // -2 w (l.z)^2 = -(1/2) z^T (4 w l l^T) z
    Eigen::Matrix4d precision = Eigen::Matrix4d::Zero();
    for (const auto& [w, l] : terms) {
        precision += 4.0 * w * l * l.transpose();
    }
    return WignerGaussian(precision, 4.0 / (kPi * kPi));
}

double wigner_eval(const CovarianceMatrix& sigma, const PhasePoint& z) {
    return WignerGaussian::from_covariance(sigma)(z);
}

void QuadratureGrid::validate() const {
    if (points < 32) {
        throw std::invalid_argument(fmt::format("quadrature grid needs at least 32 points per axis, got {}", points));
    }
    if (!(sigmas >= 6.0)) {
        throw std::invalid_argument(fmt::format("quadrature grid must span at least 6 standard deviations, got {}", sigmas));
    }
}

GridIntegrals integrate_on_grid(const WignerGaussian& w, const QuadratureGrid& grid, int threads) {
    grid.validate();
    const int n = grid.points;
    const GridSweep sweep(w, grid);
    std::vector<RowSums> rows(n);

    const int workers = std::clamp(threads, 1, n);
    if (workers == 1) {
        for (int a = 0; a < n; ++a) rows[a] = sweep.row(a);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int k = 0; k < workers; ++k) {
            pool.emplace_back([&, k] {
                for (int a = k; a < n; a += workers) rows[a] = sweep.row(a);
            });
        }
    }

    std::vector<double> buf(n);
    auto reduce_rows = [&](auto field) {
        for (int a = 0; a < n; ++a) buf[a] = field(rows[a]);
        return pairwise_sum(buf);
    };
    const double outer_cell = sweep.step(0) * sweep.step(1);
    const double full_cell = outer_cell * sweep.step(2) * sweep.step(3);

    GridIntegrals out;
    out.normalization = outer_cell * reduce_rows([](const RowSums& r) { return r.marginal; });
    out.marginal_square = outer_cell * reduce_rows([](const RowSums& r) { return r.marginal_sq; });
    for (std::size_t k = 0; k < kMomentIndex.size(); ++k) {
        const double m = w.norm() * full_cell * reduce_rows([k](const RowSums& r) { return r.moments[k]; });
        const auto [i, j] = kMomentIndex[k];
        out.second_moments(i, j) = m;
        out.second_moments(j, i) = m;
    }
    out.normalization *= w.norm();
    out.marginal_square *= w.norm() * w.norm();
    return out;
}

namespace {

GridIntegrals checked_integrals(const WignerGaussian& w, const QuadratureGrid& grid, const QuadratureOptions& opts) {
    GridIntegrals in = integrate_on_grid(w, grid, opts.threads);
    const double defect = std::abs(in.normalization - 1.0);
    if (!(defect <= opts.normalization_tol)) {
        throw UnderResolvedGrid(fmt::format("grid normalization off by {:.3e} (N={}, k={}); refine the grid",
                                            defect, grid.points, grid.sigmas));
    }
    return in;
}

// principal-axis anisotropy grows like e^{4r}; beyond r = 1 the default grid no longer resolves it
void require_resolvable(const TmssParams& params) {
    if (params.r() > kMaxOracleSqueezing) {
        throw std::invalid_argument(
            fmt::format("grid oracle supports r <= {}, got r={}", kMaxOracleSqueezing, params.r()));
    }
}

}  // namespace

double quadrature_impurity(const WignerGaussian& w, const QuadratureGrid& grid, const QuadratureOptions& opts) {
    const GridIntegrals in = checked_integrals(w, grid, opts);
    return 1.0 - opts.purity_prefactor * in.marginal_square;
}

GridCheck grid_check(const TmssParams& params, const QuadratureGrid& grid, const QuadratureOptions& opts) {
    require_resolvable(params);
    const GridIntegrals in = checked_integrals(theta_tmss_wigner(params), grid, opts);
    const Matrix sigma = theta_tmss_covariance(params).matrix();
    GridCheck out;
    out.impurity = 1.0 - opts.purity_prefactor * in.marginal_square;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double diff = std::abs(in.second_moments(i, j) - sigma(i, j));
            out.moment_errors(i, j) = std::abs(sigma(i, j)) < kZeroEntry ? diff : diff / std::abs(sigma(i, j));
        }
    }
    return out;
}

double quadrature_impurity(const TmssParams& params, const QuadratureGrid& grid, const QuadratureOptions& opts) {
    return grid_check(params, grid, opts).impurity;
}

Eigen::Matrix4d moment_check(const TmssParams& params, const QuadratureGrid& grid, const QuadratureOptions& opts) {
    return grid_check(params, grid, opts).moment_errors;
}

}  // namespace tmss
