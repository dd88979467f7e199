#include "tmss/tmss_family.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tmss {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr double kSnapTol = 4e-15;
const double kBelowOne = std::nextafter(1.0, 0.0);

// log(sinh x) for x > 0 without overflow.
double log_sinh(double x) {
    if (x < 20.0) {
        return std::log(std::sinh(x));
    }
    return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

// log(1 + e^t)
double softplus(double t) {
    if (t > 0.0) {
        return t + std::log1p(std::exp(-t));
    }
    return std::log1p(std::exp(t));
}

}  // namespace

TmssParams::TmssParams(double r, double theta) : r_(r), theta_(theta) {
    if (!(r >= 0.0 && r <= kMaxSqueezing)) {
        throw std::invalid_argument(fmt::format("squeezing r={} outside [0, {}]", r, kMaxSqueezing));
    }
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("theta must be finite");
    }
}

namespace {

// The family in EPR coordinates (xi, nu, eta, mu): diagonal squeezed variances with the
// (eta, mu) block rotated by theta. Mapping this back with E is the same congruence as
// vb_rotation(theta) * tmss * vb_rotation(theta)^T, associated so that every single-mode
// entry is a sum of non-negative terms rather than a difference of e^{2r}-sized ones.
CovarianceMatrix from_epr_frame(double r, double theta) {
    const double anti = std::exp(2.0 * r) * kVacuumVariance;
    const double sq = std::exp(-2.0 * r) * kVacuumVariance;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Matrix epr = Matrix::Zero(4, 4);
    epr(0, 0) = sq;
    epr(1, 1) = anti;
    epr(2, 2) = c * c * anti + s * s * sq;
    epr(3, 3) = s * s * anti + c * c * sq;
    epr(2, 3) = epr(3, 2) = c * s * (anti - sq);
    const Matrix e = epr_basis_change().matrix();
    Matrix sigma = e.transpose() * epr * e;
    return CovarianceMatrix(0.5 * (sigma + sigma.transpose()));
}

}  // namespace

CovarianceMatrix tmss_covariance(double r) {
    if (!(r >= 0.0)) {
        throw std::invalid_argument(fmt::format("squeezing r={} must be non-negative", r));
    }
    return from_epr_frame(r, 0.0);
}

CovarianceMatrix theta_tmss_covariance(const TmssParams& params) {
    return from_epr_frame(params.r(), params.theta());
}

double detail::snapped_cos(double theta) {
    // remainder is exact, so theta, pi - theta and theta + pi fold onto the same angle
    const double folded = std::abs(std::remainder(theta, std::numbers::pi));
    if (kHalfPi - folded <= kSnapTol) {
        return 0.0;
    }
    return std::cos(folded);
}

ImpurityValue detail::impurity_from_cos(double r, double cos_theta) {
    // 3 + cosh4r + 2cos2theta sinh^2 2r = 4 (1 + u),  u = cos^2(theta) sinh^2(2r),
    // so 1 - E = (1 + u)^{-1/2}.
    double log1p_u = 0.0;
    if (cos_theta != 0.0 && r > 0.0) {
        if (r <= 50.0) {
            const double sh = std::sinh(2.0 * r);
            log1p_u = std::log1p(cos_theta * cos_theta * sh * sh);
        } else {
            const double log_u = 2.0 * std::log(std::abs(cos_theta)) + 2.0 * log_sinh(2.0 * r);
            log1p_u = softplus(log_u);
        }
    }
    const double log_one_minus = -0.5 * log1p_u + 0.0;  // +0.0 turns -0 into 0
    // once 1 - E drops below half an ulp of 1 the value would round to 1; keep it in [0, 1)
    const double value = std::min(-std::expm1(log_one_minus) + 0.0, kBelowOne);
    return ImpurityValue{value, log_one_minus};
}

ImpurityValue impurity_closed_form(const TmssParams& params) {
    return detail::impurity_from_cos(params.r(), detail::snapped_cos(params.theta()));
}

double impurity_from_covariance(const TmssParams& params) {
    const double p = purity(reduce(theta_tmss_covariance(params), 0));
    return std::max(0.0, 1.0 - p);
}

double transition_width(double r, double level) {
    if (!(r > 0.0 && r <= kMaxSqueezing)) {
        throw std::invalid_argument(fmt::format("transition_width needs 0 < r <= {}, got {}", kMaxSqueezing, r));
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument(fmt::format("level {} outside (0, 1)", level));
    }
    // theta = pi/2 - delta, so cos(theta) = sin(delta); E increases with delta on [0, pi/2]
    auto excess = [&](double delta) { return detail::impurity_from_cos(r, std::sin(delta)).value - level; };
    double lo = 0.0;
    double hi = kHalfPi;
    if (!(excess(hi) > 0.0)) {
        throw std::domain_error(
            fmt::format("level {} is not reached at r={} (max E = {})", level, r, excess(hi) + level));
    }
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (excess(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace tmss
