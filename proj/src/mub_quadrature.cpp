#include "tmss/mub_quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace tmss {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinAngleGap = 1e-3;

// Phase of conj(<x|bra>) <x|ket> written as alpha x^2 + beta x + const.
struct Chirp {
    double alpha;
    double beta;
};

Chirp chirp_of(const MubKernel& bra, const MubKernel& ket) {
    const double sb = std::sin(bra.theta), cb = std::cos(bra.theta);
    const double sk = std::sin(ket.theta), ck = std::cos(ket.theta);
    return Chirp{0.5 * (cb / sb - ck / sk), ket.y / sk - bra.y / sb};
}

// Value at 0 of the quadratic through three points.
double richardson(const std::array<double, 3>& x, const std::array<double, 3>& y) {
    double out = 0.0;
    for (int i = 0; i < 3; ++i) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
        }
        out += w * y[i];
    }
    return out;
}

// delta-function side of an overlap: |y, m pi> is the position eigenstate x = (-1)^m y
double delta_position(const MubKernel& k) { return std::cos(k.theta) > 0.0 ? k.y : -k.y; }

}  // namespace

bool MubKernel::degenerate() const { return std::abs(std::sin(theta)) <= kKernelDegeneracy; }

Complex kernel_eval(const MubKernel& k, double x) {
    if (k.degenerate()) {
        throw std::domain_error(fmt::format("kernel at theta={} degenerates to a delta function", k.theta));
    }
    const double s = std::sin(k.theta);
    const double c = std::cos(k.theta);
    const double phase = -((k.y * k.y + x * x) * c - 2.0 * k.y * x) / (2.0 * s);
    return std::polar(1.0 / std::sqrt(2.0 * kPi * std::abs(s)), phase);
}

void RegulatorSchedule::validate() const {
    if (epsilons.size() < 4) {
        throw std::invalid_argument("regulator schedule needs at least four damping strengths");
    }
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || (i > 0 && !(epsilons[i] < epsilons[i - 1]))) {
            throw std::invalid_argument("regulator damping strengths must be positive and strictly decreasing");
        }
    }
    if (!(extent_factor >= 6.0)) {
        throw std::invalid_argument("integration half-width must be at least 6/sqrt(eps)");
    }
    if (!(points_per_oscillation >= 8.0)) {
        throw std::invalid_argument("need at least 8 samples per oscillation");
    }
    if (!(cauchy_tol > 0.0)) {
        throw std::invalid_argument("Cauchy tolerance must be positive");
    }
}

Complex regularized_overlap(const MubKernel& bra, const MubKernel& ket, double eps, const RegulatorSchedule& sched) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("damping strength must be positive");
    }
    const Chirp ch = chirp_of(bra, ket);
    if (!(std::abs(ch.alpha) > 0.0)) {
        throw std::domain_error("overlap of a basis with itself is a delta function");
    }
    const double center = -ch.beta / (2.0 * ch.alpha);
    const double half = sched.extent_factor / std::sqrt(eps);
    const double max_freq = 2.0 * std::abs(ch.alpha) * half;
    double h = 2.0 * kPi / (sched.points_per_oscillation * max_freq);
    h = std::min(h, 0.25 / std::sqrt(eps));
    const auto n = static_cast<long>(std::ceil(2.0 * half / h));
    h = 2.0 * half / static_cast<double>(n);

    Complex sum{0.0, 0.0};
    for (long i = 0; i < n; ++i) {
        const double x = center - half + (static_cast<double>(i) + 0.5) * h;
        const double u = x - center;
        sum += std::conj(kernel_eval(bra, x)) * kernel_eval(ket, x) * std::exp(-eps * u * u);
    }
    return sum * h;
}

ExtrapolatedOverlap extrapolated_overlap(const MubKernel& bra, const MubKernel& ket, const RegulatorSchedule& sched) {
    sched.validate();
    const double gap = std::sin(ket.theta - bra.theta);
    if (std::abs(gap) <= kMinAngleGap) {
        throw std::domain_error(fmt::format("bases at theta={} and {} are too close to be unbiased", bra.theta, ket.theta));
    }
    if (bra.degenerate()) {
        return ExtrapolatedOverlap{kernel_eval(ket, delta_position(bra)), {}, 0.0};
    }
    if (ket.degenerate()) {
        return ExtrapolatedOverlap{std::conj(kernel_eval(bra, delta_position(ket))), {}, 0.0};
    }

    ExtrapolatedOverlap out;
    const std::size_t m = sched.epsilons.size();
    out.samples.reserve(m);
    std::vector<double> log_mod(m), phase(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Complex v = regularized_overlap(bra, ket, sched.epsilons[i], sched);
        out.samples.push_back(v);
        log_mod[i] = std::log(std::abs(v));
        phase[i] = std::arg(v);
        if (i > 0) {
            phase[i] -= 2.0 * kPi * std::round((phase[i] - phase[i - 1]) / (2.0 * kPi));
        }
    }

    auto estimate = [&](std::size_t last) {
        const std::array<double, 3> e{sched.epsilons[last - 2], sched.epsilons[last - 1], sched.epsilons[last]};
        const double lm = richardson(e, {log_mod[last - 2], log_mod[last - 1], log_mod[last]});
        const double ph = richardson(e, {phase[last - 2], phase[last - 1], phase[last]});
        return std::polar(std::exp(lm), ph);
    };
    out.value = estimate(m - 1);
    out.cauchy_gap = std::abs(out.value - estimate(m - 2));
    if (!(out.cauchy_gap <= sched.cauchy_tol)) {
        throw ExtrapolationError(fmt::format("eps -> 0 extrapolation not converged (gap {:.3e})", out.cauchy_gap));
    }
    return out;
}

double overlap_modulus(double y1, double t1, double y2, double t2, const RegulatorSchedule& sched) {
    return std::abs(extrapolated_overlap(MubKernel{y2, t2}, MubKernel{y1, t1}, sched).value);
}

Complex fourier_check(double y, double k, double theta, const RegulatorSchedule& sched) {
    return extrapolated_overlap(MubKernel{y, theta}, MubKernel{k, theta + kPi / 2}, sched).value;
}

double fourier_global_phase(double theta, const RegulatorSchedule& sched) {
    return std::arg(fourier_check(0.0, 0.0, theta, sched));
}

double predicted_overlap_modulus(double dtheta) {
    return 1.0 / std::sqrt(2.0 * kPi * std::abs(std::sin(dtheta)));
}

}  // namespace tmss
