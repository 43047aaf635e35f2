// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "brs/commands.hpp"
#include "brs/data_io.hpp"
#include "brs/exact_sum.hpp"
#include "brs/forecast.hpp"
#include "brs/market_sim.hpp"
#include "brs/provider_economics.hpp"
#include "brs/simulation.hpp"
#include "brs/vg_economics.hpp"
#include "support/random_scenario.hpp"

using namespace brs;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Fails the criterion, keeping the first message.
struct Check {
    Outcome out;
    void require(bool cond, const std::string& msg) {
        if (!cond && out.ok) {
            out.ok = false;
            out.detail = msg;
        }
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Adaptive double-exponential quadrature; copes with the integrable endpoint
// singularities of Beta densities with shape < 1.
double integrate(const std::function<double(double)>& f, double lo, double hi) {
    if (hi <= lo) return 0.0;
    static boost::math::quadrature::tanh_sinh<double> ts(15);
    return ts.integrate(f, lo, hi, 1e-13);
}

struct Config {
    VgSchedule s;
    PenaltyFactors pf;
    ForecastDistribution d;
};

Config draw_config(std::mt19937_64& rng, double shape_lo, double shape_hi) {
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const double cap = uni(50, 300);
    return {{uni(0.05, 0.95) * cap, uni(10, 80)},
            {uni(0.05, 0.8), uni(0.05, 0.8)},
            ForecastDistribution::from_shapes(cap, uni(shape_lo, shape_hi), uni(shape_lo, shape_hi))};
}

// --- 1 ---------------------------------------------------------------------

Outcome critical_fractile() {
    Check c;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto k = draw_config(rng, 0.8, 8.0);
        auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
        // Prices span zero through above the demand ceiling.
        const double pd = uni(0, 1.1) * k.s.da_price * k.pf.over;
        const double pu = uni(0, 1.1) * k.s.da_price * k.pf.under;
        const auto opt = optimal_position(k.s, k.pf, k.d, pd, pu);

        // The objective is separable by side; grid-search each with the other at zero.
        const double cap = k.d.capacity();
        for (Direction dir : {Direction::DownCoversOver, Direction::UpCoversUnder}) {
            const double room = headroom(k.s, cap, dir);
            const int steps = static_cast<int>(std::floor(room / 0.1 + 1e-9));
            double best_r = 0.0;
            double best_v = -1e300;
            for (int j = 0; j <= steps + 1; ++j) {
                const double r = std::min(0.1 * j, room);
                BrsPosition pos{0, 0, pd, pu};
                (dir == Direction::DownCoversOver ? pos.down_covers_over : pos.up_covers_under) = r;
                const double v = expected_profit(k.s, k.pf, pos, k.d);
                if (v > best_v) {
                    best_v = v;
                    best_r = r;
                }
            }
            const double err = std::abs(opt.quantity(dir) - best_r);
            worst = std::max(worst, err);
            c.require(err <= 0.5, fmt("config %d %s: optimal %.4f vs grid %.4f", i,
                                      std::string(to_string(dir)).c_str(), opt.quantity(dir), best_r));
        }
    }
    if (c.out.ok) c.out.detail = fmt("max |optimal - grid| = %.4f MW over 200 configs", worst);
    return c.out;
}

// --- 2 ---------------------------------------------------------------------

Outcome gradient_check() {
    Check c;
    std::mt19937_64 rng(202);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    double worst = 0.0;
    int done = 0;
    while (done < 100) {
        const auto k = draw_config(rng, 0.8, 8.0);
        const double cap = k.d.capacity();
        const double h = 1e-3 * cap;
        // Evaluation points away from the distribution tails: the band edges sit
        // at output quantiles in [0.05, 0.95].
        const double rd = quantile(k.d, uni(0.05, 0.95)) - k.s.da_quantity;
        const double ru = k.s.da_quantity - quantile(k.d, uni(0.05, 0.95));
        if (rd < h || rd > cap - k.s.da_quantity - h || ru < h || ru > k.s.da_quantity - h) continue;

        auto er = [&](double a, double b) { return expected_revenue(k.s, k.pf, {a, b, 0, 0}, k.d); };
        const double fd_down = (er(rd + h, ru) - er(rd - h, ru)) / (2 * h);
        const double fd_up = (er(rd, ru + h) - er(rd, ru - h)) / (2 * h);
        const double md = marginal_utility_down(k.s, k.pf, k.d, rd);
        const double mu = marginal_utility_up(k.s, k.pf, k.d, ru);
        const double e = std::max(rel_err(fd_down, md), rel_err(fd_up, mu));
        worst = std::max(worst, e);
        c.require(e <= 1e-3, fmt("point %d: relative error %.3g", done, e));
        ++done;
    }
    if (c.out.ok) c.out.detail = fmt("max relative error %.3g over 100 points", worst);
    return c.out;
}

// --- 3 ---------------------------------------------------------------------

Outcome closed_form_vs_quadrature() {
    Check c;
    std::mt19937_64 rng(303);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto k = draw_config(rng, 0.8, 8.0);
        const double cap = k.d.capacity();
        const BrsPosition pos{uni(0, 1) * (cap - k.s.da_quantity), uni(0, 1) * k.s.da_quantity, 0, 0};
        const double closed = expected_revenue(k.s, k.pf, pos, k.d);

        auto integrand = [&](double p) { return revenue_with_brs(k.s, k.pf, pos, cap, p) * pdf(k.d, p); };
        std::vector<double> knots{0.0, k.s.da_quantity - pos.up_covers_under, k.s.da_quantity,
                                  k.s.da_quantity + pos.down_covers_over, cap};
        std::sort(knots.begin(), knots.end());
        double quad = 0.0;
        for (std::size_t j = 0; j + 1 < knots.size(); ++j) quad += integrate(integrand, knots[j], knots[j + 1]);

        const double e = rel_err(closed, quad);
        worst = std::max(worst, e);
        c.require(e <= 1e-4, fmt("config %d: closed %.10g vs quadrature %.10g", i, closed, quad));
    }
    if (c.out.ok) c.out.detail = fmt("max relative error %.3g over 100 configs", worst);
    return c.out;
}

// --- 4 ---------------------------------------------------------------------

Outcome worked_example() {
    Check c;
    const auto m = apply_execution({100, 200}, Direction::DownCoversOver, 20);
    c.require(m.vg == 120 && m.provider == 180, fmt("schedules %.17g / %.17g", m.vg, m.provider));
    c.require(m.vg + m.provider == 300, "total not conserved exactly");

    const auto day = simulate_day(load_scenario(BRS_DATA_DIR "/worked_example.json"));
    const auto& sched = day.hours.at(0).modified_schedules;
    c.require(sched.at("vg") == 120 && sched.at("provider") == 180, "simulated schedules differ");
    if (c.out.ok) c.out.detail = "100/200 MW with 20 MW downward -> 120/180 MW, total 300 MW";
    return c.out;
}

// --- 5 ---------------------------------------------------------------------

Outcome settlement_equivalence() {
    Check c;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto cfg = testing_support::random_scenario(1000 + seed);
        cfg.claim_error_sd = 0.0;
        const auto day = simulate_day(cfg);
        c.require(day.ledger.grand_total() == 0.0, fmt("seed %d: day ledger sum nonzero", int(seed)));

        for (const auto& rec : day.hours) {
            const int h = rec.hour;
            std::map<std::string, ExactSum> net;
            ExactSum hour_total;
            for (const auto& e : day.ledger.entries()) {
                if (e.hour != h) continue;
                net[e.payee].add(e.amount);
                net[e.payer].add(-e.amount);
                hour_total.add(e.amount);
                hour_total.add(-e.amount);
            }
            c.require(hour_total.value() == 0.0, fmt("seed %d hour %d: ledger sum nonzero", int(seed), h));

            // Independent reconstruction from the contract outcomes.
            BrsPosition pos;
            double premium_paid = 0.0;
            std::map<std::string, double> premium_recv;
            std::map<std::string, double> shift;
            for (const auto& k : day.contracts) {
                if (k.hour() != h || k.status() == ContractStatus::Rejected) continue;
                premium_paid += k.premium();
                premium_recv[k.seller()] += k.premium();
                if (k.direction() == Direction::DownCoversOver) {
                    pos.down_covers_over += k.quantity();
                    shift[k.seller()] -= k.executed();
                } else {
                    pos.up_covers_under += k.quantity();
                    shift[k.seller()] += k.executed();
                }
            }
            const double vg_formula = revenue_with_brs(cfg.schedule(h), cfg.penalty, pos, cfg.capacity,
                                                       rec.realized) - premium_paid;
            const double vg_ledger = net[cfg.vg_id].value();
            const double ev = rel_err(vg_ledger, vg_formula);
            worst = std::max(worst, ev);
            c.require(ev <= 1e-9, fmt("seed %d hour %d vg: ledger %.17g vs %.17g", int(seed), h,
                                      vg_ledger, vg_formula));

            for (const auto& u : cfg.units) {
                const auto unit = u.at_hour(h);
                const double rt = cfg.rt_price_at(h);
                const double out = u.rt_output.empty() ? rt_dispatch(unit, rt) : u.rt_output[h];
                const JointScenario sc{rec.da_price, rt, shift[u.id]};
                const double formula = revenue_unit_with_brs(unit, sc, out) + premium_recv[u.id];
                const double e = rel_err(net[u.id].value(), formula);
                worst = std::max(worst, e);
                c.require(e <= 1e-9, fmt("seed %d hour %d %s: ledger %.17g vs %.17g", int(seed), h,
                                         u.id.c_str(), net[u.id].value(), formula));
            }
        }
    }
    if (c.out.ok) c.out.detail = fmt("50 days, max relative error %.3g, every ledger sums to 0", worst);
    return c.out;
}

// --- 6 ---------------------------------------------------------------------

Outcome demand_curves_nested() {
    Check c;
    const auto cfg = load_scenario(BRS_DATA_DIR "/wind_day.json");
    const std::vector<double> alphas{0.1, 0.3, 0.5};
    const int points = 51;
    const auto t = cli::demand_curve_table(cfg, 12, alphas, points);
    // Rows are grouped by direction, then alpha, then grid point.
    const std::size_t block = points;
    int compared = 0;
    for (std::size_t dir = 0; dir < 2; ++dir) {
        for (std::size_t a = 1; a < alphas.size(); ++a) {
            for (std::size_t p = 0; p < block; ++p) {
                const std::size_t lo = (dir * alphas.size() + a - 1) * block + p;
                const std::size_t hi = lo + block;
                c.require(t.text(lo, "direction") == t.text(hi, "direction") &&
                              t.number(lo, "quantity") == t.number(hi, "quantity") &&
                              t.number(lo, "alpha") < t.number(hi, "alpha"),
                          "unexpected table layout");
                c.require(t.number(hi, "marginal_value") >= t.number(lo, "marginal_value"),
                          fmt("row %zu: alpha %.2f below alpha %.2f", hi, t.number(hi, "alpha"),
                              t.number(lo, "alpha")));
                ++compared;
            }
        }
    }
    if (c.out.ok) c.out.detail = fmt("%d pointwise comparisons at hour 12", compared);
    return c.out;
}

// --- 7 ---------------------------------------------------------------------

Outcome profit_sweep() {
    Check c;
    const auto cfg = load_scenario(BRS_DATA_DIR "/wind_day.json");
    std::vector<double> ratios;
    for (int i = 0; i <= 10; ++i) ratios.push_back(0.05 * i);
    const std::vector<double> scales{0.5, 1.0, 1.5, 2.0};
    const auto t = cli::profit_sweep_table(cfg, ratios, scales);

    auto profit = [&](std::size_t s, std::size_t r) { return t.number(s * ratios.size() + r, "expected_profit"); };
    auto no_brs = [&](std::size_t s) { return t.number(s * ratios.size(), "no_brs_revenue"); };
    const double tol = 1e-9;

    for (std::size_t s = 0; s < scales.size(); ++s) {
        for (std::size_t r = 1; r < ratios.size(); ++r) {
            c.require(profit(s, r) <= profit(s, r - 1) * (1 + tol),
                      fmt("(a) scale %.1f: profit rises from ratio %.2f to %.2f", scales[s], ratios[r - 1], ratios[r]));
        }
    }
    for (std::size_t r = 0; r < ratios.size(); ++r) {
        for (std::size_t s = 1; s < scales.size(); ++s) {
            c.require(profit(s, r) <= profit(s - 1, r) * (1 + tol),
                      fmt("(b) ratio %.2f: profit rises from scale %.1f to %.1f", ratios[r], scales[s - 1], scales[s]));
        }
    }
    for (std::size_t s = 0; s < scales.size(); ++s) {
        const double e = rel_err(profit(s, ratios.size() - 1), no_brs(s));
        c.require(e <= 1e-3, fmt("(c) scale %.1f: %.3g from no-BRS revenue", scales[s], e));
    }
    double lambda_mean = 0.0;
    for (int h = 0; h < cfg.horizon; ++h) lambda_mean += cfg.schedule(h).da_price * cfg.forecast(h).mean();
    for (std::size_t s = 0; s < scales.size(); ++s) {
        c.require(rel_err(profit(s, 0), lambda_mean) <= 1e-9,
                  fmt("(d) scale %.1f: ratio-0 profit %.10g vs %.10g", scales[s], profit(s, 0), lambda_mean));
    }
    if (c.out.ok) {
        c.out.detail = fmt("44 cells; ratio 0 -> %.2f for every scale; ratio 0.5 -> no-BRS levels", lambda_mean);
    }
    return c.out;
}

// --- 8 ---------------------------------------------------------------------

Outcome zero_mean_delta() {
    Check c;
    ScenarioGeneratorConfig g;
    g.correlation = 0.0;
    g.seed = 808;
    const auto sc = generate_scenarios(g, 100000);
    const auto r = risk_report(cli::default_base_load_unit(), sc);
    c.require(std::abs(r.expected_delta) <= 3 * r.delta_stderr,
              fmt("|mean| %.4g exceeds 3 stderr %.4g", std::abs(r.expected_delta), 3 * r.delta_stderr));
    if (c.out.ok) c.out.detail = fmt("mean %.4g, stderr %.4g, 1e5 samples", r.expected_delta, r.delta_stderr);
    return c.out;
}

// --- 9 ---------------------------------------------------------------------

Outcome incremental_variance() {
    Check c;
    const auto four = four_outcome_scenarios();
    const std::vector<double> w(four.size(), 1.0);
    const auto base = risk_report(cli::default_base_load_unit(), four, w);

    // Oracle: population variance of (lambda_D - lambda_R) * executed over the four outcomes.
    double m = 0.0;
    for (const auto& s : four) m += payoff_delta(s) / 4.0;
    double v = 0.0;
    for (const auto& s : four) v += (payoff_delta(s) - m) * (payoff_delta(s) - m) / 4.0;
    c.require(v == 2500.0, fmt("oracle variance %.17g", v));
    c.require(std::abs(base.incremental_variance - v) <= 4 * std::numeric_limits<double>::epsilon() * v,
              fmt("base-load increment %.17g vs %.17g", base.incremental_variance, v));

    int ordered = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto sc = generate_scenarios(cli::default_generator(seed, 0.5), 100000);
        const auto cmp = compare_kinds(cli::default_base_load_unit(), cli::default_marginal_unit(), sc);
        c.require(cmp.marginal.incremental_variance < cmp.base.incremental_variance,
                  fmt("seed %d: marginal %.6g not below base %.6g", int(seed),
                      cmp.marginal.incremental_variance, cmp.base.incremental_variance));
        if (cmp.marginal_below_base) ++ordered;
    }
    if (c.out.ok) c.out.detail = fmt("four-outcome increment %.1f; marginal < base in %d/20 seeds",
                                     base.incremental_variance, ordered);
    return c.out;
}

// --- 10 --------------------------------------------------------------------

Outcome forecast_module() {
    Check c;
    const std::vector<double> as{0.8, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    const std::vector<double> bs{0.8, 1.5, 3.0, 5.0, 8.0};
    double worst_inv = 0.0;
    double worst_norm = 0.0;
    for (double a : as) {
        for (double b : bs) {
            const auto d = ForecastDistribution::from_shapes(100, a, b);
            for (int i = 1; i < 100; ++i) {
                const double q = i / 100.0;
                const double e = std::abs(cdf(d, quantile(d, q)) - q);
                worst_inv = std::max(worst_inv, e);
                c.require(e <= 1e-8, fmt("(%.1f, %.1f) q=%.2f: inversion error %.3g", a, b, q, e));
            }
            const double mass = integrate([&](double p) { return pdf(d, p); }, 0, 100);
            worst_norm = std::max(worst_norm, std::abs(mass - 1));
            c.require(std::abs(mass - 1) <= 1e-6, fmt("(%.1f, %.1f): pdf mass %.10g", a, b, mass));
            for (double s : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 100.0}) {
                const auto scaled = scale_variance(d, {s});
                c.require(scaled.mean() == d.mean(), fmt("(%.1f, %.1f) factor %.2f: mean %.17g vs %.17g",
                                                         a, b, s, scaled.mean(), d.mean()));
            }
        }
    }
    if (c.out.ok) {
        c.out.detail = fmt("50 shape pairs: inversion %.2g, mass %.2g, mean preserved exactly",
                           worst_inv, worst_norm);
    }
    return c.out;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Outcome (*run)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "critical fractile vs grid search", 30, critical_fractile},
        {2, "gradient check", 5, gradient_check},
        {3, "closed form vs quadrature", 10, closed_form_vs_quadrature},
        {4, "worked example schedules", 1, worked_example},
        {5, "settlement equivalence and zero-sum", 30, settlement_equivalence},
        {6, "demand curves nested in alpha", 1, demand_curves_nested},
        {7, "profit sweep shape", 60, profit_sweep},
        {8, "zero-mean payoff delta", 10, zero_mean_delta},
        {9, "incremental variance", 20, incremental_variance},
        {10, "forecast module", 10, forecast_module},
    };

    int failures = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.ok && secs > cr.budget_s) {
            o = {false, fmt("took %.2f s, budget %.0f s", secs, cr.budget_s)};
        }
        if (!o.ok) ++failures;
        std::printf("AC%-2d %s  %-38s %7.3f s  %s\n", cr.id, o.ok ? "PASS" : "FAIL", cr.name, secs,
                    o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", int(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
