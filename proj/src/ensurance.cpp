#include "hcs/ensurance.hpp"

#include "hcs/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace hcs {

namespace {

struct BlockSums {
    double shortage{};
    double burden{};
    double shortage_sq{};
    double burden_sq{};
    double cross{};
    std::size_t indicator{};
    std::size_t count{};
};

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// E[(c - X)^+] for X ~ Normal(mu, sigma).
double normal_lower_partial(double c, double mu, double sigma) {
    const double z = (c - mu) / sigma;
    return (c - mu) * std_normal_cdf(z) + sigma * std_normal_pdf(z);
}

BlockSums run_block(const PopulationModel &model, std::uint64_t seed, std::size_t block,
                    std::size_t count) {
    std::mt19937_64 rng{splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(block) +
                                                     0x632be59bd9b4e019ULL))};
    std::poisson_distribution<std::int64_t> expenditure{model.lambda_med / model.money_quantum};
    std::normal_distribution<double> income{model.mu_inc, model.sigma_inc};

    BlockSums sums;
    sums.count = count;
    for (std::size_t i = 0; i < count; ++i) {
        const double x_med = model.money_quantum * static_cast<double>(expenditure(rng));
        const double x_inc = income(rng);
        const auto s = shortage_sample(x_med, x_inc, model);
        sums.shortage += s.shortage;
        sums.burden += s.burden;
        sums.shortage_sq += s.shortage * s.shortage;
        sums.burden_sq += s.burden * s.burden;
        sums.cross += s.shortage * s.burden;
        sums.indicator += static_cast<std::size_t>(s.indicator);
    }
    return sums;
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void validate(const PopulationModel &model) {
    auto fail = [](const std::string &msg) { throw DomainError("population model: " + msg); };
    if (!std::isfinite(model.lambda_med) || model.lambda_med <= 0.0) {
        fail("lambda_med must be > 0");
    }
    if (!std::isfinite(model.mu_inc)) {
        fail("mu_inc must be finite");
    }
    if (!std::isfinite(model.sigma_inc) || model.sigma_inc <= 0.0) {
        fail("sigma_inc must be > 0");
    }
    if (!std::isfinite(model.essential_expense) || model.essential_expense < 0.0) {
        fail("essential_expense must be >= 0");
    }
    if (!(model.k_gov >= 0.0 && model.k_gov <= 1.0)) {
        fail("k_gov must lie in [0, 1]");
    }
    if (!std::isfinite(model.n_insured) || model.n_insured < 0.0 ||
        !std::isfinite(model.n_uninsured) || model.n_uninsured < 0.0) {
        fail("population counts must be finite and >= 0");
    }
    if (model.n_insured + model.n_uninsured <= 0.0) {
        fail("total population must be > 0");
    }
    if (!std::isfinite(model.money_quantum) || model.money_quantum <= 0.0) {
        fail("money_quantum must be > 0");
    }
}

double insured_proportion(const PopulationModel &model) {
    const double total = model.n_insured + model.n_uninsured;
    if (!(total > 0.0) || model.n_insured < 0.0 || model.n_uninsured < 0.0) {
        throw DomainError("insured_proportion: population must be positive");
    }
    return model.n_insured / total;
}

ShortageSample shortage_sample(double x_med, double x_inc, const PopulationModel &model) {
    if (!std::isfinite(x_med) || x_med < 0.0) {
        throw DomainError("shortage_sample: x_med must be finite and >= 0");
    }
    if (!std::isfinite(x_inc)) {
        throw DomainError("shortage_sample: x_inc must be finite");
    }
    ShortageSample out;
    out.burden = x_med * (1.0 - model.k_gov);
    const double disposable = x_inc - model.essential_expense;
    // Without medical expenditure there is nothing to fall short on.
    if (x_med > 0.0 && out.burden > disposable) {
        out.indicator = 1;
        out.shortage = std::min(out.burden, out.burden - disposable);
    }
    return out;
}

EnsuranceEstimate perfect_ensurance_mc(const PopulationModel &model, std::size_t n_samples,
                                       std::uint64_t seed, unsigned workers) {
    validate(model);
    if (n_samples == 0) {
        throw DomainError("perfect_ensurance_mc: n_samples must be >= 1");
    }
    const std::size_t n_blocks = (n_samples + mc_block_size - 1) / mc_block_size;
    std::vector<BlockSums> blocks(n_blocks);

    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_blocks));

    auto block_len = [&](std::size_t b) {
        return std::min(mc_block_size, n_samples - b * mc_block_size);
    };
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            blocks[b] = run_block(model, seed, b, block_len(b));
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < n_blocks; b = next++) {
                    blocks[b] = run_block(model, seed, b, block_len(b));
                }
            });
        }
    }

    BlockSums total;
    for (const auto &b : blocks) {
        total.shortage += b.shortage;
        total.burden += b.burden;
        total.shortage_sq += b.shortage_sq;
        total.burden_sq += b.burden_sq;
        total.cross += b.cross;
        total.indicator += b.indicator;
        total.count += b.count;
    }

    EnsuranceEstimate est;
    est.n_samples = n_samples;
    est.seed = seed;
    est.p_insure = insured_proportion(model);
    est.indicator_rate = static_cast<double>(total.indicator) / static_cast<double>(n_samples);
    const double uninsured = 1.0 - est.p_insure;
    if (total.burden > 0.0) {
        const double ratio = total.shortage / total.burden;
        est.shortage_ratio = ratio;
        if (n_samples > 1) {
            const double n = static_cast<double>(n_samples);
            const double mean_burden = total.burden / n;
            const double resid_sq = std::max(
                0.0, total.shortage_sq - 2.0 * ratio * total.cross + ratio * ratio * total.burden_sq);
            const double var_ratio = resid_sq / (n - 1.0) / n / (mean_burden * mean_burden);
            est.std_error = uninsured * std::sqrt(var_ratio);
        }
    }
    est.p_ei = 1.0 - uninsured * est.shortage_ratio;
    return est;
}

ShortageMoments shortage_moments(const PopulationModel &model, const QuadratureOptions &options) {
    validate(model);
    if (!(options.tail_eps > 0.0 && options.tail_eps <= 1e-6)) {
        throw DomainError("tail_eps must lie in (0, 1e-6]");
    }
    const double mean = model.lambda_med / model.money_quantum;
    const double log_mean = std::log(mean);
    auto pmf = [&](std::int64_t k) {
        const double kd = static_cast<double>(k);
        return std::exp(kd * log_mean - mean - std::lgamma(kd + 1.0));
    };

    const auto mode = static_cast<std::int64_t>(std::floor(mean));
    std::int64_t lo = mode;
    while (lo > 0 && pmf(lo - 1) >= options.tail_eps) {
        --lo;
        if (static_cast<std::size_t>(mode - lo) > options.index_cap) {
            break;
        }
    }
    std::int64_t hi = mode;
    while (pmf(hi + 1) >= options.tail_eps) {
        ++hi;
        if (static_cast<std::size_t>(hi - lo + 1) > options.index_cap) {
            break;
        }
    }
    const auto terms = static_cast<std::size_t>(hi - lo + 1);
    if (terms > options.index_cap) {
        throw ResourceError("Poisson truncation needs more than " +
                            std::to_string(options.index_cap) +
                            " terms; increase money_quantum or the index cap");
    }

    ShortageMoments m;
    m.terms = terms;
    const double e_e = model.essential_expense;
    const double floor_term = normal_lower_partial(e_e, model.mu_inc, model.sigma_inc);
    for (std::int64_t k = lo; k <= hi; ++k) {
        const double p = pmf(k);
        const double burden = model.money_quantum * static_cast<double>(k) * (1.0 - model.k_gov);
        const double threshold = burden + e_e;
        // E[clamp(threshold - X, 0, burden)] = E[(threshold - X)^+] - E[(e_e - X)^+]
        const double shortage =
            burden > 0.0
                ? normal_lower_partial(threshold, model.mu_inc, model.sigma_inc) - floor_term
                : 0.0;
        m.expected_shortage += p * shortage;
        m.expected_burden += p * burden;
        if (k > 0) {
            m.indicator_probability +=
                p * std_normal_cdf((threshold - model.mu_inc) / model.sigma_inc);
        }
    }
    return m;
}

double perfect_ensurance_quadrature(const PopulationModel &model, const QuadratureOptions &options) {
    const auto m = shortage_moments(model, options);
    const double uninsured = 1.0 - insured_proportion(model);
    if (uninsured == 0.0 || m.expected_burden <= 0.0) {
        return 1.0;
    }
    const double ratio = std::clamp(m.expected_shortage / m.expected_burden, 0.0, 1.0);
    return 1.0 - uninsured * ratio;
}

double perfect_ensurance_quadrature(const PopulationModel &model, double tail_eps) {
    QuadratureOptions options;
    options.tail_eps = tail_eps;
    return perfect_ensurance_quadrature(model, options);
}

double perfect_ensurance_closed(double f_income, double f_med, double f_gov1, double p_uninsure,
                                double e_indicator) {
    if (!std::isfinite(f_income) || f_income < 0.0) {
        throw DomainError("f_income must be finite and >= 0");
    }
    if (!std::isfinite(f_gov1) || f_gov1 < 0.0) {
        throw DomainError("f_gov1 must be finite and >= 0");
    }
    if (!std::isfinite(f_med) || f_gov1 >= f_med) {
        throw DomainError("closed-form ensurance requires f_med > f_gov1 (pole at f_gov1 = f_med)");
    }
    if (!(p_uninsure >= 0.0 && p_uninsure <= 1.0) || !(e_indicator >= 0.0 && e_indicator <= 1.0)) {
        throw DomainError("p_uninsure and e_indicator must lie in [0, 1]");
    }
    const double value = 1.0 - p_uninsure * e_indicator * (1.0 - f_income / (f_med - f_gov1));
    return std::clamp(value, 0.0, 1.0);
}

} // namespace hcs
