#pragma once

// The theta-parametrized two-mode squeezed family and its linear-entropy
// entanglement 1 - tr(rho_1^2).

#include "tmss/phase_space.hpp"

namespace tmss {

inline constexpr double kMaxSqueezing = 400.0;

/// One member of the family: squeezing r in [0, 400], angle theta (radians).
/// Any finite theta is accepted; everything depends on it through cos(2 theta).
class TmssParams {
public:
    TmssParams(double r, double theta);

    double r() const { return r_; }
    double theta() const { return theta_; }

private:
    double r_;
    double theta_;
};

/// Linear entropy E together with log(1 - E). The log is computed directly,
/// so it stays exact where 1 - E underflows.
struct ImpurityValue {
    double value;
    double log_one_minus;
};

/// Two-mode squeezed vacuum: Var eta = Var nu = e^{2r}/4, Var xi = Var mu = e^{-2r}/4.
CovarianceMatrix tmss_covariance(double r);

/// tmss_covariance(r) rotated by vb_rotation(theta).
CovarianceMatrix theta_tmss_covariance(const TmssParams& params);

/// E = 1 - 2 / sqrt(3 + cosh 4r + 2 cos 2theta sinh^2 2r).
ImpurityValue impurity_closed_form(const TmssParams& params);

/// Same quantity obtained from the covariance: 1 - purity of the reduced mode.
double impurity_from_covariance(const TmssParams& params);

/// Distance |theta* - pi/2| of the crossing E(r, theta*) = level nearest the
/// product point, found by bisection. Throws std::domain_error if the level
/// is not reached on [0, pi/2].
double transition_width(double r, double level);

namespace detail {

/// |cos(theta)| after folding theta into [0, pi/2]; angles within a few ulp of
/// pi/2 (mod pi) map to an exact 0.
double snapped_cos(double theta);

/// Closed form written in terms of c = cos(theta).
ImpurityValue impurity_from_cos(double r, double cos_theta);

}  // namespace detail

}  // namespace tmss
