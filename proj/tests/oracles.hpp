#pragma once

// Independent reference computations used only by tests. Nothing here calls into the
// library's numerical paths: the Poisson pmf is built by recurrence, the Normal
// expectation by composite Simpson integration, and allocation optima by enumeration.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace hcs::fixtures {

/// Scalar P_mr calculator written straight from the formula.
inline double p_mr_reference(const std::array<double, 3> &re, const std::array<double, 3> &ke,
                             const std::array<double, 3> &rc, const std::array<double, 3> &kc) {
    double e = 1.0;
    double c = 1.0;
    for (int i = 0; i < 3; ++i) {
        e *= re[i] / (re[i] + ke[i]);
        c *= rc[i] / (rc[i] + kc[i]);
    }
    return e + c;
}

struct EnsuranceOracleInput {
    double lambda;
    double mu;
    double sigma;
    double essential_expense;
    double k_gov;
    double p_insure;
};

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int n) {
    if (b <= a) {
        return 0.0;
    }
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

/// p_ei by summing the Poisson pmf (recurrence from the mode) against a numerically
/// integrated Normal expectation of the per-person shortage, truncated at pmf < 1e-12.
inline double ensurance_oracle(const EnsuranceOracleInput &in) {
    const auto mode = static_cast<long>(std::floor(in.lambda));
    // log pmf at the mode via Stirling-free summation of logs
    double log_mode = -in.lambda;
    for (long j = 1; j <= mode; ++j) {
        log_mode += std::log(in.lambda) - std::log(static_cast<double>(j));
    }
    const double pmf_mode = std::exp(log_mode);
    const double pdf_norm = 1.0 / (in.sigma * std::sqrt(2.0 * std::numbers::pi));
    auto pdf = [&](double x) {
        const double z = (x - in.mu) / in.sigma;
        return pdf_norm * std::exp(-0.5 * z * z);
    };
    const double lo = in.mu - 12.0 * in.sigma;
    const double hi = in.mu + 12.0 * in.sigma;

    double e_short = 0.0;
    double e_burden = 0.0;
    auto accumulate = [&](long k, double p) {
        const double b = static_cast<double>(k) * (1.0 - in.k_gov);
        // shortage(x) = b on x < Ee, b - (x - Ee) on [Ee, Ee + b], 0 beyond
        const double a1 = std::clamp(in.essential_expense, lo, hi);
        const double a2 = std::clamp(in.essential_expense + b, lo, hi);
        const double flat = b * simpson(pdf, lo, a1, 2000);
        const double ramp = simpson(
            [&](double x) { return (b - (x - in.essential_expense)) * pdf(x); }, a1, a2, 200);
        e_short += p * (flat + ramp);
        e_burden += p * b;
    };

    double p = pmf_mode;
    for (long k = mode; k >= 0 && p >= 1e-12; --k) {
        accumulate(k, p);
        p *= static_cast<double>(k) / in.lambda;
    }
    p = pmf_mode * in.lambda / static_cast<double>(mode + 1);
    for (long k = mode + 1; p >= 1e-12; ++k) {
        accumulate(k, p);
        p *= in.lambda / static_cast<double>(k + 1);
    }
    if (e_burden == 0.0) {
        return 1.0;
    }
    return 1.0 - (1.0 - in.p_insure) * e_short / e_burden;
}

/// Calls visit(counts) for every composition of `chunks` into `bins` bins.
inline void for_each_composition(std::size_t chunks, std::size_t bins,
                                 const std::function<void(const std::vector<std::size_t> &)> &visit) {
    std::vector<std::size_t> counts(bins, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
        if (pos + 1 == bins) {
            counts[pos] = left;
            visit(counts);
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            counts[pos] = c;
            rec(pos + 1, left - c);
        }
    };
    rec(0, chunks);
}

/// Log-uniform draw in [lo, hi].
inline double log_uniform(std::mt19937_64 &rng, double lo, double hi) {
    std::uniform_real_distribution<double> u{std::log(lo), std::log(hi)};
    return std::exp(u(rng));
}

} // namespace hcs::fixtures
