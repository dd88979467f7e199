#pragma once

// Numerical checks of the rotated-quadrature bases |y, theta> = U^dagger(theta)|x = y>,
// U(theta) = exp(-i theta a^dagger a). Overlaps between bases are improper
// (Fresnel-type) integrals; they are computed with a Gaussian damping factor
// and extrapolated to zero damping.

#include <complex>
#include <stdexcept>
#include <vector>

namespace tmss {

using Complex = std::complex<double>;

/// |sin theta| at or below this makes the kernel a delta function.
inline constexpr double kKernelDegeneracy = 1e-8;

class ExtrapolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The position-space wavefunction <x | y, theta>.
struct MubKernel {
    double y;
    double theta;

    /// True when theta is within kKernelDegeneracy of a multiple of pi.
    bool degenerate() const;
};

/// (2 pi |sin theta|)^{-1/2} exp(-i[(y^2 + x^2) cos theta - 2 y x] / (2 sin theta)).
///
/// For sin theta < 0 this is the exact continuation |y, theta> = |-y, theta - pi>
/// (U^dagger(pi) is parity). Throws std::domain_error for degenerate angles.
Complex kernel_eval(const MubKernel& k, double x);

/// Damping strengths and sampling rules for the regularized overlap integrals.
struct RegulatorSchedule {
    /// strictly decreasing, at least four entries
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025, 0.0125};
    /// integration half-width L(eps) = extent_factor / sqrt(eps)
    double extent_factor = 8.0;
    /// samples per period of the fastest local oscillation on the window
    double points_per_oscillation = 8.0;
    /// largest accepted gap between the last two extrapolation windows
    double cauchy_tol = 1e-3;

    void validate() const;
};

/// integral conj(<x|bra>) <x|ket> exp(-eps (x - x_c)^2) dx on [x_c - L, x_c + L], x_c the
/// stationary point of the integrand's phase, by the uniform midpoint rule.
Complex regularized_overlap(const MubKernel& bra, const MubKernel& ket, double eps, const RegulatorSchedule& sched);

struct ExtrapolatedOverlap {
    Complex value;
    /// regularized integrals, one per schedule entry
    std::vector<Complex> samples;
    /// |estimate from the last three eps - estimate from the previous three|
    double cauchy_gap = 0.0;
};

/// <bra|ket> extrapolated to eps -> 0 with a degree-2 Richardson step on log|I| and arg I.
/// Degenerate (position-eigenstate) kernels are evaluated exactly. Throws
/// ExtrapolationError when the estimates are not Cauchy within sched.cauchy_tol.
ExtrapolatedOverlap extrapolated_overlap(const MubKernel& bra, const MubKernel& ket, const RegulatorSchedule& sched = {});

/// |<y2, t2 | y1, t1>|; expected 1/sqrt(2 pi |sin(t1 - t2)|).
double overlap_modulus(double y1, double t1, double y2, double t2, const RegulatorSchedule& sched = {});

/// <y, theta | k, theta> where |k, theta> = U^dagger(theta)|p = k> = |y = k, theta + pi/2>.
Complex fourier_check(double y, double k, double theta, const RegulatorSchedule& sched = {});

/// arg fourier_check(0, 0, theta): the constant phase of the Fourier relation
/// under this kernel's phase convention.
double fourier_global_phase(double theta, const RegulatorSchedule& sched = {});

/// 1/sqrt(2 pi |sin dtheta|)
double predicted_overlap_modulus(double dtheta);

}  // namespace tmss
