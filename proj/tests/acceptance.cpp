// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "tmss/cli.hpp"
#include "tmss/mub_quadrature.hpp"
#include "tmss/phase_space.hpp"
#include "tmss/tmss_family.hpp"
#include "tmss/wigner_oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tmss;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    std::string name;
    double time_limit_s;
    std::function<Outcome()> check;
};

std::mt19937_64 gen(20240601);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }

Outcome closed_form() {
    double worst_zero_r = 0.0;
    for (int i = 0; i < 100; ++i) {
        worst_zero_r = std::max(worst_zero_r, std::abs(impurity_closed_form(TmssParams(0.0, uniform(0, 2 * kPi))).value));
    }
    double worst_product = 0.0;
    for (int k = 1; k <= 100; ++k) {
        worst_product = std::max(worst_product, std::abs(impurity_closed_form(TmssParams(0.1 * k, kPi / 2)).value));
    }
    const double e10 = impurity_closed_form(TmssParams(1.0, 0.0)).value;
    const double err10 = std::abs(e10 - (1.0 - 1.0 / std::cosh(2.0)));
    const bool ok = worst_zero_r <= 1e-15 && worst_product <= 1e-15 && err10 <= 1e-12;
    return {ok, fmt::format("max|E(0,t)|={:.1e} max|E(r,pi/2)|={:.1e} |E(1,0)-(1-1/cosh2)|={:.1e}", worst_zero_r,
                            worst_product, err10)};
}

Outcome dual_path() {
    double worst_rel = 0.0, worst_floor = 0.0;
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const TmssParams p(uniform(0, 5), uniform(0, 2 * kPi));
        const double closed = impurity_closed_form(p).value;
        const double err = std::abs(impurity_from_covariance(p) - closed);
        // relative, with an absolute floor of 1e-15 where E itself is below 1e-3
        if (closed >= 1e-3) {
            worst_rel = std::max(worst_rel, err / closed);
        } else {
            worst_floor = std::max(worst_floor, err);
        }
        if (err > std::max(1e-12 * std::abs(closed), 1e-15)) ++bad;
    }
    return {bad == 0, fmt::format("1000 samples, worst rel {:.2e}, worst abs where E<1e-3 {:.2e}, failures {}",
                                  worst_rel, worst_floor, bad)};
}

Outcome quadrature() {
    const QuadratureGrid grid{160, 8.0};
    double worst_rel = 0.0, worst_abs = 0.0;
    int bad = 0;
    for (double r : {0.25, 0.5, 1.0}) {
        for (double t : {0.0, kPi / 6, kPi / 3, kPi / 2, 2.0}) {
            const TmssParams p(r, t);
            const double closed = impurity_closed_form(p).value;
            const double err = std::abs(quadrature_impurity(p, grid) - closed);
            if (closed < 1e-3) {
                worst_abs = std::max(worst_abs, err);
                if (err > 1e-6) ++bad;
            } else {
                worst_rel = std::max(worst_rel, err / closed);
                if (err > 1e-4 * closed) ++bad;
            }
        }
    }
    return {bad == 0, fmt::format("15 cases at N=160 k=8, worst rel {:.2e}, worst abs (E<1e-3) {:.2e}", worst_rel,
                                  worst_abs)};
}

Outcome moments() {
    const QuadratureGrid grid{160, 8.0};
    double worst_rel = 0.0, worst_abs = 0.0;
    int bad = 0;
    for (double t : {0.0, 0.7, kPi / 2}) {
        const TmssParams p(0.5, t);
        const Eigen::Matrix4d err = moment_check(p, grid);
        const Matrix sigma = theta_tmss_covariance(p).matrix();
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                if (std::abs(sigma(i, j)) < kZeroEntry) {
                    worst_abs = std::max(worst_abs, err(i, j));
                    if (err(i, j) > 1e-8) ++bad;
                } else {
                    worst_rel = std::max(worst_rel, err(i, j));
                    if (err(i, j) > 1e-4) ++bad;
                }
            }
        }
    }
    return {bad == 0, fmt::format("r=0.5, 3 angles x 10 entries, worst rel {:.2e}, worst abs {:.2e}", worst_rel,
                                  worst_abs)};
}

struct SurfaceRow {
    double r, theta, e;
};

std::vector<SurfaceRow> parse_surface(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<SurfaceRow> rows;
    while (std::getline(in, line)) {
        SurfaceRow row{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &row.r, &row.theta, &row.e) == 3) rows.push_back(row);
    }
    return rows;
}

Outcome surface_regression() {
    std::ostringstream os;
    cli::cmd_surface(cli::RunConfig{}, os);
    const auto rows = parse_surface(os.str());
    const std::size_t n_theta = 181, n_r = 81;
    if (rows.size() != n_theta * n_r) {
        return {false, fmt::format("expected {} rows, got {}", n_theta * n_r, rows.size())};
    }
    int non_monotone = 0, nonzero_product = 0;
    double top = -1.0, top_r = 0, top_t = 0;
    for (std::size_t j = 0; j < n_theta; ++j) {
        const bool product = std::abs(std::cos(rows[j].theta)) < 1e-15;
        for (std::size_t i = 0; i < n_r; ++i) {
            const SurfaceRow& cur = rows[i * n_theta + j];
            if (cur.e > top) {
                top = cur.e;
                top_r = cur.r;
                top_t = cur.theta;
            }
            if (product) {
                if (cur.e != 0.0) ++nonzero_product;
            } else if (i > 0 && cur.e < rows[(i - 1) * n_theta + j].e) {
                ++non_monotone;
            }
        }
    }
    const double top_err = std::abs(top - (1.0 - 1.0 / std::cosh(4.0)));
    const bool ok = non_monotone == 0 && nonzero_product == 0 && top_r == 2.0 && top_t == 0.0 && top_err <= 1e-12;
    return {ok, fmt::format("non-monotone steps {}, nonzero theta=pi/2 entries {}, max at ({}, {}) off by {:.1e}",
                            non_monotone, nonzero_product, top_r, top_t, top_err)};
}

Outcome sharpening() {
    std::string ratios;
    bool ok = true;
    for (double r : {3.0, 4.0, 5.0}) {
        const double q = transition_width(r + 1, 0.5) / transition_width(r, 0.5);
        ok = ok && q >= 0.129 && q <= 0.142;
        ratios += fmt::format(" {:.5f}", q);
    }
    const double log400 = impurity_closed_form(TmssParams(400.0, 0.0)).log_one_minus;
    ok = ok && std::isfinite(log400);
    return {ok, fmt::format("width ratios r=3,4,5:{}; log(1-E) at r=400: {:.6g}", ratios, log400)};
}

Outcome mub_law() {
    double worst_modulus = 0.0, worst_spread = 0.0, worst_phase = 0.0;
    for (double gap : {kPi / 6, kPi / 4, kPi / 2}) {
        const double t1 = kPi / 2 + gap / 2, t2 = kPi / 2 - gap / 2;
        const double predicted = predicted_overlap_modulus(gap);
        worst_modulus = std::max(worst_modulus, std::abs(overlap_modulus(0.0, t1, 0.0, t2) - predicted));
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 20; ++i) {
            const double m = overlap_modulus(uniform(-2, 2), t1, uniform(-2, 2), t2);
            worst_modulus = std::max(worst_modulus, std::abs(m - predicted));
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        worst_spread = std::max(worst_spread, hi - lo);
    }
    for (int i = 0; i < 10; ++i) {
        const double theta = uniform(0.2, kPi / 2 - 0.2);
        const double y = uniform(-2, 2), k = uniform(-2, 2);
        const Complex v = fourier_check(y, k, theta);
        const double phase_err = std::abs(std::remainder(std::arg(v) - fourier_global_phase(theta) - k * y, 2 * kPi));
        worst_phase = std::max({worst_phase, phase_err, std::abs(std::abs(v) - 1.0 / std::sqrt(2 * kPi))});
    }
    const bool ok = worst_modulus <= 1e-3 && worst_spread <= 2e-3 && worst_phase <= 1e-3;
    return {ok, fmt::format("modulus err {:.1e}, label spread {:.1e}, Fourier err {:.1e} (global phase {:.5f})",
                            worst_modulus, worst_spread, worst_phase, fourier_global_phase(kPi / 4))};
}

Outcome structural() {
    double worst_defect = 0.0, worst_purity = 0.0, min_nu = 1e300;
    for (int i = 0; i < 1000; ++i) {
        const double t = uniform(0, 2 * kPi);
        const int mode = i % 2;
        for (const auto& s : {vb_rotation(t), mode_rotation(t, mode, 2), mode_squeezer(uniform(-3, 3), mode, 2),
                              epr_basis_change().transform()}) {
            worst_defect = std::max(worst_defect, s.symplectic_defect());
        }
        // global purity of a double-stored state is good to ~eps e^{4r}; 1e-10 holds up to r ~ 3.5
        const auto sigma = theta_tmss_covariance(TmssParams(uniform(0, 3), t));
        worst_purity = std::max(worst_purity, std::abs(purity(sigma) - 1.0));
        min_nu = std::min({min_nu, symplectic_eigenvalues(reduce(sigma, 0))[0], symplectic_eigenvalues(reduce(sigma, 1))[0]});
    }
    const bool ok = worst_defect <= 1e-10 && worst_purity <= 1e-10 && min_nu >= 0.25 - 1e-9;
    return {ok, fmt::format("max defect {:.1e}, max |purity-1| {:.1e}, min reduced nu {:.15f}", worst_defect,
                            worst_purity, min_nu)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path();
    const auto a = dir / "tmss_acceptance_surface_a.csv";
    const auto b = dir / "tmss_acceptance_surface_b.csv";
    for (const auto& path : {a, b}) {
        const std::string out = path.string();
        const char* argv[] = {"tmss", "surface", "--out", out.c_str()};
        if (cli::run(4, argv) != 0) return {false, "surface run failed"};
    }
    const std::string sa = slurp(a), sb = slurp(b);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
    const bool ok = sa == sb && !sa.empty();
    return {ok, fmt::format("two default surface files, {} bytes each, identical: {}", sa.size(), ok)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"closed-form reproduction", 1.0, closed_form},
        {"dual-path equality", 1.0, dual_path},
        {"quadrature-oracle agreement", 120.0, quadrature},
        {"moment check", 30.0, moments},
        {"surface regression", 0.0, surface_regression},
        {"width sharpening", 1.0, sharpening},
        {"MUB law", 60.0, mub_law},
        {"structural invariants", 0.0, structural},
        {"determinism", 0.0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = fmt::format("{:.2f}s", secs);
        if (c.time_limit_s > 0.0) {
            timing += fmt::format(" / limit {:g}s", c.time_limit_s);
            if (secs > c.time_limit_s) {
                out.pass = false;
                timing += " EXCEEDED";
            }
        }
        fmt::print("{} {:<28} {} [{}]\n", out.pass ? "PASS" : "FAIL", c.name, out.detail, timing);
        if (!out.pass) ++failures;
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
