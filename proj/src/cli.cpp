#include "tmss/cli.hpp"

#include "tmss/mub_quadrature.hpp"
#include "tmss/tmss_family.hpp"
#include "tmss/wigner_oracle.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

namespace tmss::cli {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

constexpr double kDualPathRel = 1e-12;
constexpr double kDualPathFloor = 1e-15;
constexpr double kQuadratureRel = 1e-4;
constexpr double kQuadratureAbs = 1e-6;
constexpr double kSmallImpurity = 1e-3;
constexpr double kMomentRel = 1e-4;
constexpr double kMomentAbs = 1e-8;
constexpr double kMubTol = 1e-3;
constexpr double kLabelSpreadTol = 2e-3;
constexpr double kLabelRange = 2.0;
constexpr int kFourierCases = 10;

const std::vector<double> kDefaultCurveRadii{0.5, 1.0, 2.0, 3.0, 5.0};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;
};

void write_table(const Table& t, OutputFormat format, std::ostream& os) {
    if (format == OutputFormat::csv) {
        os << fmt::format("{}\n", fmt::join(t.columns, ","));
        for (const auto& row : t.rows) {
            std::string line;
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i > 0) line += ',';
                if (row[i]) line += fmt::format("{:.17g}", *row[i]);
            }
            os << line << '\n';
        }
        return;
    }
    json rows = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            obj[t.columns[i]] = row[i] ? json(*row[i]) : json(nullptr);
        }
        rows.push_back(std::move(obj));
    }
    os << json{{"columns", t.columns}, {"rows", std::move(rows)}}.dump(2) << '\n';
}

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    v.back() = hi;
    return v;
}

struct Range {
    double lo, hi;
    int steps;
};

Range resolve_range(const char* name, std::optional<double> lo, std::optional<double> hi, std::optional<int> steps,
                    Range fallback, double min_allowed, double max_allowed) {
    Range r{lo.value_or(fallback.lo), hi.value_or(fallback.hi), steps.value_or(fallback.steps)};
    if (r.steps < 2) {
        throw UsageError(fmt::format("{} steps must be at least 2, got {}", name, r.steps));
    }
    if (!(r.lo < r.hi)) {
        throw UsageError(fmt::format("{} range [{}, {}] is empty", name, r.lo, r.hi));
    }
    if (r.lo < min_allowed || r.hi > max_allowed) {
        throw UsageError(fmt::format("{} range [{}, {}] outside [{}, {}]", name, r.lo, r.hi, min_allowed, max_allowed));
    }
    return r;
}

std::vector<double> resolve_r_list(const RunConfig& cfg, const std::vector<double>& fallback, double min_allowed) {
    const std::vector<double> list = cfg.r_list.value_or(fallback);
    if (list.empty()) {
        throw UsageError("r-list must not be empty");
    }
    for (double r : list) {
        if (!(r >= min_allowed && r <= kMaxSqueezing)) {
            throw UsageError(fmt::format("r={} outside [{}, {}]", r, min_allowed, kMaxSqueezing));
        }
    }
    return list;
}

Range theta_range(const RunConfig& cfg, Range fallback) {
    return resolve_range("theta", cfg.theta_min, cfg.theta_max, cfg.theta_steps, fallback, 0.0, kTwoPi);
}

double tolerance(const RunConfig& cfg, double fallback) {
    const double tol = cfg.tol.value_or(fallback);
    if (!(tol > 0.0)) {
        throw UsageError("tolerance must be positive");
    }
    return tol;
}

// wrap to (-pi, pi]
double wrap_angle(double a) { return std::remainder(a, kTwoPi); }

Table theta_sweep(const RunConfig& cfg, Range fallback, bool log_domain) {
    const Range th = theta_range(cfg, fallback);
    const std::vector<double> radii = resolve_r_list(cfg, kDefaultCurveRadii, 0.0);
    Table t;
    t.columns = {"theta", "r", log_domain ? "log10_one_minus_E" : "E"};
    for (double r : radii) {
        for (double theta : linspace(th.lo, th.hi, th.steps)) {
            const ImpurityValue e = impurity_closed_form(TmssParams(r, theta));
            const double v = log_domain ? e.log_one_minus / std::numbers::ln10 + 0.0 : e.value;
            t.rows.push_back({theta, r, v});
        }
    }
    return t;
}

}  // namespace

int cmd_surface(const RunConfig& cfg, std::ostream& os) {
    const Range rr = resolve_range("r", cfg.r_min, cfg.r_max, cfg.r_steps, {0.0, 2.0, 81}, 0.0, kMaxSqueezing);
    const Range th = theta_range(cfg, {0.0, kPi / 2, 181});
    Table t;
    t.columns = {"r", "theta", "E"};
    const auto thetas = linspace(th.lo, th.hi, th.steps);
    for (double r : linspace(rr.lo, rr.hi, rr.steps)) {
        for (double theta : thetas) {
            t.rows.push_back({r, theta, impurity_closed_form(TmssParams(r, theta)).value});
        }
    }
    write_table(t, cfg.format, os);
    return 0;
}

int cmd_curves(const RunConfig& cfg, std::ostream& os) {
    write_table(theta_sweep(cfg, {0.0, kTwoPi, 721}, false), cfg.format, os);
    return 0;
}

int cmd_log_curves(const RunConfig& cfg, std::ostream& os) {
    write_table(theta_sweep(cfg, {kPi / 2 - 0.1, kPi / 2 + 0.1, 201}, true), cfg.format, os);
    return 0;
}

int cmd_width(const RunConfig& cfg, std::ostream& os) {
    const std::vector<double> radii = resolve_r_list(cfg, {1, 2, 3, 4, 5, 6}, 1.0);
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
        throw UsageError(fmt::format("level {} outside (0, 1)", cfg.level));
    }
    Table t;
    t.columns = {"r", "width", "ratio"};
    std::optional<double> prev;
    for (double r : radii) {
        const double w = transition_width(r, cfg.level);
        std::optional<double> ratio;
        if (prev) ratio = w / *prev;
        t.rows.push_back({r, w, ratio});
        prev = w;
    }
    write_table(t, cfg.format, os);
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& os) {
    const std::vector<double> radii = resolve_r_list(cfg, {0.0, 0.25, 0.5, 0.75, 1.0}, 0.0);
    const std::vector<double> thetas = cfg.theta_list.value_or(std::vector<double>{0.0, kPi / 6, kPi / 3, kPi / 2, 2.0});
    if (thetas.empty()) {
        throw UsageError("theta-list must not be empty");
    }
    const double quad_tol = tolerance(cfg, kQuadratureRel);
    const QuadratureGrid grid{cfg.grid_n, cfg.grid_sigmas};
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (cfg.threads < 1) {
        throw UsageError("threads must be at least 1");
    }
    QuadratureOptions qopts;
    qopts.threads = cfg.threads;
    if (cfg.prefactor) qopts.purity_prefactor = *cfg.prefactor;

    json cases = json::array();
    bool all_pass = true;
    for (double r : radii) {
        for (double theta : thetas) {
            const TmssParams params(r, theta);
            const double e_closed = impurity_closed_form(params).value;
            const double e_cov = impurity_from_covariance(params);
            const double dual_err = std::abs(e_cov - e_closed);
            bool pass = dual_err <= std::max(kDualPathRel * std::abs(e_closed), kDualPathFloor);

            json c{{"r", r}, {"theta", theta}, {"E_closed", e_closed}, {"E_covariance", e_cov},
                   {"dual_path_err", dual_err}, {"E_quadrature", nullptr}, {"max_moment_err", nullptr}};
            if (r <= kMaxOracleSqueezing) {
                try {
                    const GridCheck gc = grid_check(params, grid, qopts);
                    const double e_quad = gc.impurity;
                    const double qerr = std::abs(e_quad - e_closed);
                    const bool quad_ok = e_closed < kSmallImpurity ? qerr <= kQuadratureAbs
                                                                   : qerr <= quad_tol * std::abs(e_closed);
                    const Eigen::Matrix4d& merr = gc.moment_errors;
                    const Eigen::Matrix4d sigma = theta_tmss_covariance(params).matrix();
                    bool moments_ok = true;
                    for (int i = 0; i < 4; ++i) {
                        for (int j = 0; j < 4; ++j) {
                            const double lim = std::abs(sigma(i, j)) < kZeroEntry ? kMomentAbs : kMomentRel;
                            moments_ok = moments_ok && merr(i, j) <= lim;
                        }
                    }
                    c["E_quadrature"] = e_quad;
                    c["quadrature_err"] = qerr;
                    c["max_moment_err"] = merr.maxCoeff();
                    pass = pass && quad_ok && moments_ok;
                } catch (const UnderResolvedGrid& e) {
                    c["error"] = e.what();
                    pass = false;
                }
            }
            c["pass"] = pass;
            all_pass = all_pass && pass;
            cases.push_back(std::move(c));
        }
    }
    os << json{{"cases", std::move(cases)}, {"pass", all_pass}}.dump(2) << '\n';
    return all_pass ? 0 : 1;
}

int cmd_mub_check(const RunConfig& cfg, std::ostream& os) {
    const std::vector<double> gaps = cfg.dtheta_list.value_or(std::vector<double>{kPi / 6, kPi / 4, kPi / 2});
    if (gaps.empty()) {
        throw UsageError("dtheta-list must not be empty");
    }
    for (double g : gaps) {
        if (!(std::abs(std::sin(g)) > 1e-3)) {
            throw UsageError(fmt::format("dtheta={} is too close to a multiple of pi", g));
        }
    }
    if (cfg.labels < 1) {
        throw UsageError("labels must be at least 1");
    }
    const double tol = tolerance(cfg, kMubTol);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> label(-kLabelRange, kLabelRange);

    bool all_pass = true;
    json cases = json::array();
    json spreads = json::array();
    for (double g : gaps) {
        const double t1 = kPi / 2 + g / 2;
        const double t2 = kPi / 2 - g / 2;
        const double predicted = predicted_overlap_modulus(g);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int i = 0; i <= cfg.labels; ++i) {
            // first case uses zero labels
            const double y1 = i == 0 ? 0.0 : label(rng);
            const double y2 = i == 0 ? 0.0 : label(rng);
            json c{{"t1", t1}, {"t2", t2}, {"y1", y1}, {"y2", y2}, {"predicted", predicted}};
            try {
                const double measured = overlap_modulus(y1, t1, y2, t2);
                const double err = std::abs(measured - predicted);
                lo = std::min(lo, measured);
                hi = std::max(hi, measured);
                c["measured"] = measured;
                c["err"] = err;
                c["pass"] = err <= tol;
            } catch (const ExtrapolationError& e) {
                c["error"] = e.what();
                c["pass"] = false;
            }
            all_pass = all_pass && c["pass"].get<bool>();
            cases.push_back(std::move(c));
        }
        const double spread = hi - lo;
        const bool ok = std::isfinite(spread) && spread <= kLabelSpreadTol;
        spreads.push_back({{"dtheta", g}, {"spread", spread}, {"pass", ok}});
        all_pass = all_pass && ok;
    }

    std::uniform_real_distribution<double> angle(0.2, kPi / 2 - 0.2);
    json fourier = json::array();
    const double unit = 1.0 / std::sqrt(kTwoPi);
    for (int i = 0; i < kFourierCases; ++i) {
        const double theta = angle(rng);
        const double y = label(rng);
        const double k = label(rng);
        json c{{"theta", theta}, {"y", y}, {"k", k}, {"predicted_phase", k * y}, {"predicted_modulus", unit}};
        try {
            const Complex v = fourier_check(y, k, theta);
            const double global = fourier_global_phase(theta);
            const double err = std::max(std::abs(wrap_angle(std::arg(v) - global - k * y)), std::abs(std::abs(v) - unit));
            c["measured_modulus"] = std::abs(v);
            c["measured_phase"] = std::arg(v);
            c["global_phase"] = global;
            c["err"] = err;
            c["pass"] = err <= tol;
        } catch (const ExtrapolationError& e) {
            c["error"] = e.what();
            c["pass"] = false;
        }
        all_pass = all_pass && c["pass"].get<bool>();
        fourier.push_back(std::move(c));
    }

    os << json{{"cases", std::move(cases)},
               {"label_spread", std::move(spreads)},
               {"fourier_cases", std::move(fourier)},
               {"fourier_global_phase", fourier_global_phase(kPi / 4)},
               {"pass", all_pass}}
              .dump(2)
       << '\n';
    return all_pass ? 0 : 1;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Entanglement of the theta-parametrized two-mode squeezed family", "tmss"};
    app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
    app.require_subcommand(1, 1);

    RunConfig cfg;
    double r_min = 0, r_max = 0, theta_min = 0, theta_max = 0, tol = 0, prefactor = 0;
    int r_steps = 0, theta_steps = 0;
    std::vector<double> r_list, theta_list, dtheta_list;
    std::string format = "csv";

    // CLI11 would otherwise read an empty list entry as 0
    const CLI::Validator no_empty_entry(
        [](std::string& v) { return v.empty() ? std::string("empty list entry") : std::string(); }, "VALUES");

    auto* o_rmin = app.add_option("--r-min", r_min, "smallest squeezing");
    auto* o_rmax = app.add_option("--r-max", r_max, "largest squeezing");
    auto* o_rsteps = app.add_option("--r-steps", r_steps, "points along r");
    auto* o_rlist =
        app.add_option("--r-list", r_list, "comma-separated squeezing values")->check(no_empty_entry)->delimiter(',');
    auto* o_tmin = app.add_option("--theta-min", theta_min, "smallest angle");
    auto* o_tmax = app.add_option("--theta-max", theta_max, "largest angle");
    auto* o_tsteps = app.add_option("--theta-steps", theta_steps, "points along theta");
    auto* o_tlist =
        app.add_option("--theta-list", theta_list, "comma-separated angles (verify)")->check(no_empty_entry)->delimiter(',');
    app.add_option("--grid-n", cfg.grid_n, "quadrature points per axis")->capture_default_str();
    app.add_option("--grid-sigmas", cfg.grid_sigmas, "grid half-extent in standard deviations")->capture_default_str();
    auto* o_tol = app.add_option("--tol", tol, "pass tolerance (verify: quadrature, mub-check: overlaps)");
    app.add_option("--out", cfg.out, "output path (default stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads for the grid quadrature")->capture_default_str();
    app.add_option("--level", cfg.level, "impurity level for width")->capture_default_str();
    auto* o_dlist = app.add_option("--dtheta-list", dtheta_list, "comma-separated basis angle gaps (mub-check)")
                        ->check(no_empty_entry)
                        ->delimiter(',');
    app.add_option("--labels", cfg.labels, "random label pairs per gap (mub-check)")->capture_default_str();
    app.add_option("--seed", cfg.seed, "label generator seed (mub-check)")->capture_default_str();
    auto* o_pref = app.add_option("--prefactor", prefactor, "purity prefactor override (testing)")->group("");

    using Command = int (*)(const RunConfig&, std::ostream&);
    const std::vector<std::pair<CLI::App*, Command>> commands{
        {app.add_subcommand("surface", "E over an (r, theta) grid"), cmd_surface},
        {app.add_subcommand("curves", "E against theta for several r"), cmd_curves},
        {app.add_subcommand("log-curves", "log10(1 - E) against theta near the product point"), cmd_log_curves},
        {app.add_subcommand("width", "transition width around theta = pi/2"), cmd_width},
        {app.add_subcommand("verify", "closed form vs covariance vs Wigner-grid quadrature"), cmd_verify},
        {app.add_subcommand("mub-check", "rotated-quadrature basis overlaps"), cmd_mub_check},
    };
    for (const auto& [sub, fn] : commands) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (o_rmin->count()) cfg.r_min = r_min;
    if (o_rmax->count()) cfg.r_max = r_max;
    if (o_rsteps->count()) cfg.r_steps = r_steps;
    if (o_rlist->count()) cfg.r_list = r_list;
    if (o_tmin->count()) cfg.theta_min = theta_min;
    if (o_tmax->count()) cfg.theta_max = theta_max;
    if (o_tsteps->count()) cfg.theta_steps = theta_steps;
    if (o_tlist->count()) cfg.theta_list = theta_list;
    if (o_tol->count()) cfg.tol = tol;
    if (o_dlist->count()) cfg.dtheta_list = dtheta_list;
    if (o_pref->count()) cfg.prefactor = prefactor;
    cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;

    try {
        for (const auto& [sub, fn] : commands) {
            if (!sub->parsed()) continue;
            if (cfg.out.empty()) {
                return fn(cfg, std::cout);
            }
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) {
                throw std::runtime_error(fmt::format("cannot open '{}' for writing", cfg.out));
            }
            const int code = fn(cfg, file);
            file.close();
            if (!file) {
                throw std::runtime_error(fmt::format("failed writing '{}'", cfg.out));
            }
            return code;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}

}  // namespace tmss::cli
