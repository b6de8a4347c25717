// Acceptance suite: one PASS/FAIL line per criterion, with the measured runtime
// checked against the criterion's budget. Exit status is nonzero if any line fails.

#include "hcs/allocator.hpp"
#include "hcs/ensurance.hpp"
#include "hcs/evaluation.hpp"
#include "hcs/model_core.hpp"
#include "hcs/profiles_io.hpp"
#include "hcs/subordinate_metrics.hpp"
#include "instances.hpp"
#include "oracles.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace hcs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok{false};
    std::string detail;
};

int failures = 0;

void criterion(const std::string &name, double budget_seconds, const std::function<Outcome()> &body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception &e) {
        o = {false, std::string{"exception: "} + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_seconds;
    const bool pass = o.ok && in_time;
    if (!pass) {
        ++failures;
    }
    std::ostringstream line;
    line << (pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << secs << " s, limit "
         << budget_seconds << " s" << (in_time ? "" : ", too slow") << "]";
    std::cout << line.str() << std::endl;
}

std::string data(const char *name) { return (fs::path{HCS_DATA_DIR} / name).string(); }

PopulationModel oracle_model() {
    PopulationModel m;
    m.lambda_med = 800.0;
    m.mu_inc = 3000.0;
    m.sigma_inc = 1000.0;
    m.essential_expense = 2500.0;
    m.k_gov = 0.3;
    m.n_insured = 85.0;
    m.n_uninsured = 15.0;
    return m;
}

std::pair<int, std::string> run_cli(const std::string &args) {
    const std::string cmd = std::string{HCS_CLI} + " " + args + " 2>/dev/null";
    std::string out;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return {-1, out};
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

/// Largest one-chunk objective gain over every lattice point of the reduced instance.
double max_chunk_gain(const AllocationProblem &p, const CategorySet &dims, std::size_t chunks) {
    const double chunk = p.f_total / static_cast<double>(chunks);
    double best = 0.0;
    for (std::size_t used = 0; used < chunks; ++used) {
        fixtures::for_each_composition(used, dims.size(), [&](const std::vector<std::size_t> &c) {
            ExpenditureVector x = p.baseline;
            for (std::size_t i = 0; i < dims.size(); ++i) {
                x(dims[i]) += static_cast<double>(c[i]) * chunk;
            }
            const double here = objective(x, p);
            for (int d : dims) {
                auto y = x;
                y(d) += chunk;
                if (y(1) <= aid_cap(p)) {
                    best = std::max(best, objective(y, p) - here);
                }
            }
        });
    }
    return best;
}

/// Continuous optimum of a product of saturating shares under a budget, from the
/// stationarity condition h_i / (x_i (x_i + h_i)) = lambda solved by bisection on lambda.
double product_optimum(const std::array<double, 3> &h, double budget) {
    auto spend = [&](double lambda) {
        double s = 0.0;
        for (double hi : h) {
            s += 0.5 * (-hi + std::sqrt(hi * hi + 4.0 * hi / lambda));
        }
        return s;
    };
    double lo = 1e-30;
    double hi = 1e30;
    for (int i = 0; i < 400; ++i) {
        const double mid = std::sqrt(lo * hi);
        (spend(mid) > budget ? lo : hi) = mid;
    }
    const double lambda = std::sqrt(lo * hi);
    double prod = 1.0;
    for (double hh : h) {
        const double x = 0.5 * (-hh + std::sqrt(hh * hh + 4.0 * hh / lambda));
        prod *= x / (x + hh);
    }
    return prod;
}

AllocationProblem reduced_problem() {
    AllocationProblem p;
    p.f_total = 1000.0;
    p.f_med = 2000.0;
    p.f_income = 600.0;
    p.p_uninsure = 0.5;
    p.e_indicator = 0.8;
    p.s_salary = 2.0;
    p.coeffs.k_N = 50.0;
    p.coeffs.k_M = 100.0;
    p.sat.k_essential = {1.0, 2.0, 4.0};
    p.sat.k_complementary = {3.0, 1.5, 0.5};
    p.n_unit_essential = {60.0, 20.0, 30.0};
    p.n_unit_complementary = {40.0, 50.0, 60.0};
    return p;
}

} // namespace

int main() {
    std::cout.precision(10);

    criterion("universal coverage identity", 1.0, [] {
        auto m = oracle_model();
        m.n_uninsured = 0.0;
        bool ok = true;
        for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL, ~0ULL}) {
            for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{1000}, std::size_t{100000}}) {
                ok = ok && perfect_ensurance_mc(m, n, seed).p_ei == 1.0;
            }
        }
        ok = ok && perfect_ensurance_quadrature(m) == 1.0;
        ok = ok && perfect_ensurance_closed(40000.0, 114000.0, 0.0, 0.0, 0.7) == 1.0;
        const auto sweden = load_scenario(data("sweden_like_scenario.json"));
        EvaluationOptions o;
        o.samples = 1000;
        ok = ok && evaluate(sweden, std::nullopt, o).p_ei == 1.0;
        return Outcome{ok, "MC (16 seed/n pairs), quadrature, closed form and the Sweden-like report give exactly 1"};
    });

    criterion("MC-quadrature convergence", 60.0, [] {
        const auto m = oracle_model();
        const double ref = perfect_ensurance_quadrature(m);
        const double indep = fixtures::ensurance_oracle({800.0, 3000.0, 1000.0, 2500.0, 0.3, 0.85});
        int within = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto est = perfect_ensurance_mc(m, 1'000'000, seed);
            within += std::abs(est.p_ei - ref) <= 3.0 * est.std_error ? 1 : 0;
        }
        std::ostringstream d;
        d.precision(12);
        d << within << "/100 seeds within 3 std_error of " << ref << " (independent oracle "
          << indep << ")";
        return Outcome{within >= 99 && std::abs(ref - indep) < 1e-9, d.str()};
    });

    criterion("saturation property suite", 10.0, [] {
        std::mt19937_64 rng{2024};
        std::uniform_real_distribution<double> u{0.0, 1.0};
        std::uniform_int_distribution<int> pick{0, 5};
        std::size_t checks = 0;
        std::size_t violations = 0;
        auto check = [&](bool cond) {
            ++checks;
            violations += cond ? 0 : 1;
        };
        ModelCoefficients coeffs;
        for (int i = 0; i < 10000; ++i) {
            const double x = fixtures::log_uniform(rng, 1e-6, 1e6);
            const double k = fixtures::log_uniform(rng, 1e-6, 1e6);
            const double s = saturating_share(x, k);
            check(s >= 0.0 && s < 1.0);

            SaturationCoefficients sat;
            std::array<double, 6> r{};
            for (std::size_t j = 0; j < 3; ++j) {
                sat.k_essential[j] = fixtures::log_uniform(rng, 0.05, 20.0);
                sat.k_complementary[j] = fixtures::log_uniform(rng, 0.05, 20.0);
                r[j] = u(rng) < 0.05 ? 0.0 : fixtures::log_uniform(rng, 1e-3, 1e3);
                r[j + 3] = u(rng) < 0.05 ? 0.0 : fixtures::log_uniform(rng, 1e-3, 1e3);
            }
            auto p_mr = [&](const std::array<double, 6> &v) {
                return practical_effect({v[0], v[1], v[2]}, {v[3], v[4], v[5]}, sat);
            };
            const double before = p_mr(r);
            check(before >= 0.0 && before < 2.0);
            auto up = r;
            up[static_cast<std::size_t>(pick(rng))] += fixtures::log_uniform(rng, 1e-6, 1e3);
            check(p_mr(up) >= before);

            coeffs.k_N = fixtures::log_uniform(rng, 1.0, 1e6);
            coeffs.k_M = fixtures::log_uniform(rng, 1.0, 1e6);
            const double n = fixtures::log_uniform(rng, 1e-3, 1e7);
            const double f = fixtures::log_uniform(rng, 1e-3, 1e7);
            const double hc = potential_of_health_care(n, f, coeffs);
            check(hc >= 0.0 && hc < 1.0);
            check(potential_of_health_care(n * (1.0 + u(rng)), f, coeffs) >= hc);
            check(potential_of_health_care(n, f * (1.0 + u(rng)), coeffs) >= hc);

            const LuxuryComponents lux{0.999 * u(rng), 0.999 * u(rng), u(rng), 0.999 * u(rng)};
            if (lux.r_essential + lux.r_complementary + lux.p_ei + lux.p_hc > 0.0) {
                const double li = luxury_index(lux);
                check(li >= 0.0 && li <= 1.0);
            }

            const double rural = 10.0 * u(rng);
            const double urban = 0.01 + 10.0 * u(rng);
            const double c = fixtures::log_uniform(rng, 1e-3, 1e3);
            const double fd = fairness_degree({rural, urban});
            check(std::abs(fairness_degree({rural * c, urban * c}) - fd) <= 1e-14 * std::max(1.0, fd));
        }
        std::ostringstream d;
        d << violations << " violations in " << checks << " checks";
        return Outcome{violations == 0 && checks >= 10000, d.str()};
    });

    criterion("delay identity", 1.0, [] {
        ModelCoefficients coeffs;
        coeffs.k_N = 1e5;
        coeffs.k_M = 2e4;
        coeffs.tau = 25;
        std::mt19937_64 rng{25};
        std::vector<ResearchEntry> entries;
        for (int y = 1970; y < 2000; ++y) {
            entries.push_back({y, fixtures::log_uniform(rng, 1e3, 1e6), fixtures::log_uniform(rng, 1e2, 1e5)});
        }
        const ResearchSeries series{entries};
        int mismatches = 0;
        for (const auto &e : entries) {
            const double lhs = power_of_tech(series, e.year + 25, coeffs);
            const double rhs = potential_of_health_care(e.staff, e.funding, coeffs);
            mismatches += lhs == rhs ? 0 : 1;
        }
        return Outcome{mismatches == 0, std::to_string(entries.size()) + " years, " +
                                            std::to_string(mismatches) + " bitwise mismatches"};
    });

    criterion("allocator oracle equivalence", 30.0, [] {
        std::ostringstream d;
        d.precision(12);
        bool ok = true;

        // Spec-shaped reduced instance: categories 1..3, ten chunks.
        const auto p = reduced_problem();
        const CategorySet dims{1, 2, 3};
        const auto grid = grid_oracle(p, dims, 10);
        const auto greedy = greedy_allocate(p, p.f_total / 10.0, dims);
        const double slack = max_chunk_gain(p, dims, 10);
        AscentOptions ascent_opts;
        ascent_opts.dims = dims;
        const auto refined = projected_ascent(p, greedy.x, ascent_opts);
        ok = ok && greedy.objective >= grid.objective - slack && refined.objective >= greedy.objective;
        d << "dims{1,2,3}: grid " << grid.objective << ", greedy " << greedy.objective
          << " (slack " << slack << "), ascent " << refined.objective;

        // Interior optimum: essential categories only, where the continuous optimum is known.
        auto q = reduced_problem();
        const CategorySet inner{4, 5, 6};
        const auto grid_in = grid_oracle(q, inner, 10);
        const auto greedy_in = greedy_allocate(q, q.f_total / 10.0, inner);
        ascent_opts.dims = inner;
        const auto refined_in = projected_ascent(q, greedy_in.x, ascent_opts);
        const auto h = half_saturation_levels(q);
        const double prod = product_optimum({h[3], h[4], h[5]}, q.f_total);
        const double optimum = (p_ei_of({}, q) + prod) * q.coeffs.E_0 / q.coeffs.k_q;
        const bool interior = grid_in.x(4) > 0 && grid_in.x(5) > 0 && grid_in.x(6) > 0;
        const double rel = std::abs(refined_in.objective - optimum) / optimum;
        ok = ok && interior && greedy_in.objective >= grid_in.objective - max_chunk_gain(q, inner, 10) &&
             refined_in.objective >= greedy_in.objective &&
             refined_in.objective >= grid_in.objective * (1.0 - 1e-6) && rel <= 1e-6;
        d << "; dims{4,5,6}: grid " << grid_in.objective << ", greedy " << greedy_in.objective
          << ", ascent " << refined_in.objective << ", continuous optimum " << optimum
          << " (rel diff " << rel << ")";
        return Outcome{ok, d.str()};
    });

    criterion("budget exactness", 60.0, [] {
        std::mt19937_64 rng{1000};
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            const auto p = fixtures::random_problem(rng, i % 2 == 1);
            const auto greedy = greedy_allocate(p, p.f_total / 300.0);
            AscentOptions opts;
            opts.max_iters = 20;
            const auto refined = projected_ascent(p, greedy.x, opts);
            for (const auto &plan : {uniform_allocate(p), greedy, refined}) {
                const bool exact = std::abs(plan.x.sum() - p.f_total) <= p.f_total * 1e-12;
                const bool capped = (p.baseline + plan.x)(1) <= aid_cap(p);
                bad += plan.feasible && exact && capped ? 0 : 1;
            }
        }
        return Outcome{bad == 0, "3000 plans (uniform, greedy, refined) on 1000 instances, " +
                                     std::to_string(bad) + " violations"};
    });

    criterion("greedy dominance", 60.0, [] {
        std::mt19937_64 rng{4242};
        int violations = 0;
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto p = fixtures::random_problem(rng, i % 2 == 1);
            const double g = greedy_allocate(p, p.f_total / 300.0).objective;
            const double u = uniform_allocate(p).objective;
            if (g < u) {
                ++violations;
                worst = std::max(worst, (u - g) / u);
            }
        }
        std::ostringstream d;
        d << violations << " violations in 1000 instances";
        if (violations > 0) {
            d << " (worst relative shortfall " << worst << ")";
        }
        return Outcome{violations == 0, d.str()};
    });

    criterion("300000 budget CLI smoke test", 30.0, [] {
        const std::string args = "optimize " + data("us_like_scenario.json") + " --budget 300000";
        const auto a = run_cli(args);
        const auto b = run_cli(args);
        if (a.first != 0) {
            return Outcome{false, "exit code " + std::to_string(a.first)};
        }
        const auto doc = nlohmann::json::parse(a.second);
        double sum = 0.0;
        for (const auto &v : doc["f"]) {
            sum += v.get<double>();
        }
        const bool feasible = doc["feasible"].get<bool>();
        const bool exact = std::abs(sum - 300000.0) <= 300000.0 * 1e-12;
        const bool same = a.second == b.second && b.first == 0;
        std::ostringstream d;
        d.precision(12);
        d << "objective " << doc["objective"].get<double>() << ", feasible " << feasible
          << ", sum " << sum << ", identical reruns " << same;
        return Outcome{feasible && exact && same, d.str()};
    });

    criterion("matching-degree inversion", 1.0, [] {
        const double gdp = 46000.0;
        const double l = gdp / std::exp(10.0 / 1.66);
        const auto m = matching_degree({gdp, l});
        std::ostringstream d;
        d.precision(15);
        d << "L_index " << l << " gives " << m.value;
        return Outcome{std::abs(m.value - 1.66) <= 1e-9 && !m.out_of_regime, d.str()};
    });

    criterion("report self-consistency", 60.0, [] {
        std::vector<MetricReport> reports;
        EvaluationOptions mc;
        mc.samples = 100'000;
        EvaluationOptions quad;
        quad.quadrature = true;
        std::vector<double> k_q;
        for (const char *name :
             {"us_like_scenario.json", "sweden_like_scenario.json", "china_like_scenario.json"}) {
            const auto s = load_scenario(data(name));
            for (const auto &o : {mc, quad}) {
                reports.push_back(evaluate(s, std::nullopt, o));
                k_q.push_back(s.coefficients.k_q);
            }
        }
        const auto us = load_scenario(data("us_like_scenario.json"));
        for (auto &row : history(us, 1990, 2008, true, mc).rows) {
            reports.push_back(row);
            k_q.push_back(us.coefficients.k_q);
        }
        int bad = 0;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            // Check the emitted (serialized) values, not only the in-memory ones.
            const auto doc = nlohmann::json::parse(report_json(reports[i]));
            const double l = doc["l_index"], q = doc["q_life"], e = doc["e_life"];
            const double mr = doc["p_mr"], ei = doc["p_ei"], tech = doc["p_tech"];
            const bool ok = std::abs(l - q * e) <= 1e-12 * std::max(1.0, std::abs(l)) &&
                            std::abs(q - (mr + ei + tech) / k_q[i]) <= 1e-12;
            bad += ok ? 0 : 1;
        }
        return Outcome{bad == 0, std::to_string(reports.size()) + " reports, " + std::to_string(bad) +
                                     " identity violations"};
    });

    return failures == 0 ? 0 : 1;
}
