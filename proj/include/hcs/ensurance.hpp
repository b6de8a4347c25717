#pragma once

#include <cstddef>
#include <cstdint>

namespace hcs {

/// Distributional model of the uninsured population.
///
/// Annual medical expenditure is Poisson in units of `money_quantum`
/// (X_med = quantum * Poisson(lambda_med / quantum)), net income is
/// Normal(mu_inc, sigma_inc). All money fields share one per-person currency unit.
struct PopulationModel {
    double lambda_med{1.0};
    double mu_inc{0.0};
    double sigma_inc{1.0};
    double essential_expense{0.0};
    double k_gov{0.0};
    double n_insured{0.0};
    double n_uninsured{1.0};
    double money_quantum{1.0};

    bool operator==(const PopulationModel &) const = default;
};

void validate(const PopulationModel &model);

struct EnsuranceEstimate {
    double p_ei{1.0};
    double p_insure{1.0};
    double shortage_ratio{0.0};
    /// Empirical rate of membership in the shortage set A.
    double indicator_rate{0.0};
    std::size_t n_samples{0};
    std::uint64_t seed{0};
    /// Delta-method standard error of p_ei.
    double std_error{0.0};

    bool operator==(const EnsuranceEstimate &) const = default;
};

struct ShortageSample {
    int indicator{0};
    double shortage{0.0};
    double burden{0.0};

    bool operator==(const ShortageSample &) const = default;
};

/// Population expectations of the per-person shortage terms.
struct ShortageMoments {
    double expected_shortage{0.0};
    double expected_burden{0.0};
    double indicator_probability{0.0};
    std::size_t terms{0};
};

struct QuadratureOptions {
    double tail_eps{1e-12};
    /// Maximum number of Poisson terms before giving up with ResourceError.
    std::size_t index_cap{10'000'000};
};

double insured_proportion(const PopulationModel &model);

/// Evaluates one individual against the shortage set A.
///
/// burden is the out-of-pocket share of the expenditure; the individual is in A when
/// x_med > 0 and the burden exceeds income net of essential expenses. The shortage is
/// the unmet part of the out-of-pocket expenditure and never exceeds the burden itself.
ShortageSample shortage_sample(double x_med, double x_inc, const PopulationModel &model);

/// Samples per independent RNG block. Block b draws from a generator seeded by
/// (seed, b), so the estimate does not depend on how blocks are spread over workers.
inline constexpr std::size_t mc_block_size = 1u << 16;

/// Seeded Monte Carlo estimate of the perfect ensurance index.
/// `workers == 0` selects std::thread::hardware_concurrency().
EnsuranceEstimate perfect_ensurance_mc(const PopulationModel &model, std::size_t n_samples,
                                       std::uint64_t seed, unsigned workers = 0);

/// Deterministic expectations: exact sum over the Poisson index, Normal part in closed form.
ShortageMoments shortage_moments(const PopulationModel &model, const QuadratureOptions &options = {});

/// 1 - (1 - p_insure) * E[shortage] / E[burden] via shortage_moments.
double perfect_ensurance_quadrature(const PopulationModel &model, double tail_eps = 1e-12);
double perfect_ensurance_quadrature(const PopulationModel &model, const QuadratureOptions &options);

/// Aggregate closed form used by the allocator:
/// 1 - p_uninsure * e_indicator * (1 - f_income / (f_med - f_gov1)), clamped to [0, 1].
double perfect_ensurance_closed(double f_income, double f_med, double f_gov1, double p_uninsure,
                                double e_indicator);

/// SplitMix64 finalizer; used to derive per-block generator seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace hcs
