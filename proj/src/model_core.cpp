#include "hcs/model_core.hpp"

#include "hcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hcs {

namespace {

constexpr const char *component_names[3] = {"doctors", "nurses", "beds"};

void require_nonnegative(double value, const char *what) {
    if (!std::isfinite(value) || value < 0.0) {
        throw DomainError(std::string{what} + " must be finite and >= 0, got " +
                          std::to_string(value));
    }
}

void require_positive(double value, const char *what) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw DomainError(std::string{what} + " must be finite and > 0, got " +
                          std::to_string(value));
    }
}

} // namespace

ResearchSeries::ResearchSeries(std::vector<ResearchEntry> entries) : entries_{std::move(entries)} {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        require_nonnegative(entries_[i].staff, "research staff");
        require_nonnegative(entries_[i].funding, "research funding");
        if (i > 0 && entries_[i].year <= entries_[i - 1].year) {
            throw DomainError("research series years must be strictly increasing (" +
                              std::to_string(entries_[i - 1].year) + " then " +
                              std::to_string(entries_[i].year) + ")");
        }
    }
}

int ResearchSeries::first_year() const {
    if (entries_.empty()) {
        throw LookupError("research series is empty", 0);
    }
    return entries_.front().year;
}

int ResearchSeries::last_year() const {
    if (entries_.empty()) {
        throw LookupError("research series is empty", 0);
    }
    return entries_.back().year;
}

std::optional<ResearchEntry> ResearchSeries::find(int year) const {
    auto it = std::ranges::lower_bound(entries_, year, {}, &ResearchEntry::year);
    if (it == entries_.end() || it->year != year) {
        return std::nullopt;
    }
    return *it;
}

const ResearchEntry &ResearchSeries::at(int year, SeriesMissPolicy policy) const {
    auto it = std::ranges::lower_bound(entries_, year, {}, &ResearchEntry::year);
    if (it != entries_.end() && it->year == year) {
        return *it;
    }
    if (policy == SeriesMissPolicy::nearest_prior && it != entries_.begin()) {
        return *std::prev(it);
    }
    throw LookupError("research series has no entry for year " + std::to_string(year), year);
}

void validate(const ResourceBundle &bundle) {
    const auto values = bundle.as_array();
    for (std::size_t i = 0; i < 3; ++i) {
        require_nonnegative(values[i], component_names[i]);
    }
}

void validate(const SaturationCoefficients &coeffs) {
    for (std::size_t i = 0; i < 3; ++i) {
        require_positive(coeffs.k_essential[i], "k_essential");
        require_positive(coeffs.k_complementary[i], "k_complementary");
    }
}

void validate(const ModelCoefficients &coeffs) {
    require_positive(coeffs.k_q, "k_q");
    require_positive(coeffs.k_N, "k_N");
    require_positive(coeffs.k_M, "k_M");
    require_positive(coeffs.E_0, "E_0");
    require_nonnegative(coeffs.k_lt, "k_lt");
    if (coeffs.tau < 0) {
        throw DomainError("tau must be >= 0, got " + std::to_string(coeffs.tau));
    }
}

double saturating_share(double x, double k) {
    require_nonnegative(x, "saturating_share input");
    require_positive(k, "half-saturation constant");
    return x / (x + k);
}

double resource_product(const ResourceBundle &bundle, const std::array<double, 3> &k) {
    const auto r = bundle.as_array();
    return saturating_share(r[0], k[0]) * saturating_share(r[1], k[1]) *
           saturating_share(r[2], k[2]);
}

double practical_effect(const ResourceBundle &essential, const ResourceBundle &complementary,
                        const SaturationCoefficients &coeffs) {
    return resource_product(essential, coeffs.k_essential) +
           resource_product(complementary, coeffs.k_complementary);
}

double potential_of_health_care(double staff, double funding, const ModelCoefficients &coeffs) {
    return saturating_share(staff, coeffs.k_N) * saturating_share(funding, coeffs.k_M);
}

double power_of_tech(const ResearchSeries &series, int year, const ModelCoefficients &coeffs) {
    const auto &entry = series.at(year - coeffs.tau, coeffs.miss_policy);
    return potential_of_health_care(entry.staff, entry.funding, coeffs);
}

double life_expectancy(double p_hc, const ModelCoefficients &coeffs) {
    if (!(p_hc >= 0.0 && p_hc < 1.0)) {
        throw DomainError("p_hc must lie in [0, 1), got " + std::to_string(p_hc));
    }
    return coeffs.E_0 + coeffs.k_lt * p_hc;
}

double quality_of_life(double p_mr, double p_ei, double p_tech, const ModelCoefficients &coeffs) {
    if (!(p_mr >= 0.0 && p_mr < 2.0)) {
        throw DomainError("p_mr must lie in [0, 2), got " + std::to_string(p_mr));
    }
    if (!(p_ei >= 0.0 && p_ei <= 1.0)) {
        throw DomainError("p_ei must lie in [0, 1], got " + std::to_string(p_ei));
    }
    if (!(p_tech >= 0.0 && p_tech < 1.0)) {
        throw DomainError("p_tech must lie in [0, 1), got " + std::to_string(p_tech));
    }
    require_positive(coeffs.k_q, "k_q");
    return (p_mr + p_ei + p_tech) / coeffs.k_q;
}

double life_index(double q_life, double e_life) {
    require_nonnegative(q_life, "q_life");
    require_positive(e_life, "e_life");
    return q_life * e_life;
}

SaturationCoefficients calibrate_saturation(const std::array<double, 3> &k_essential,
                                            const ResourceBundle &baseline_essential,
                                            const ResourceBundle &baseline_complementary) {
    validate(baseline_essential);
    validate(baseline_complementary);
    const auto re = baseline_essential.as_array();
    const auto rc = baseline_complementary.as_array();
    SaturationCoefficients out{k_essential, {}};
    for (std::size_t i = 0; i < 3; ++i) {
        require_positive(k_essential[i], "k_essential");
        if (rc[i] == 0.0) {
            throw DomainError(std::string{"cannot calibrate k_complementary."} +
                              component_names[i] +
                              ": baseline complementary density is 0; supply k_complementary "
                              "explicitly");
        }
        out.k_complementary[i] = re[i] * k_essential[i] / rc[i];
        if (out.k_complementary[i] <= 0.0) {
            throw DomainError(std::string{"cannot calibrate k_complementary."} +
                              component_names[i] +
                              ": baseline essential density is 0; supply k_complementary "
                              "explicitly");
        }
    }
    return out;
}

SaturationCoefficients calibrate_saturation(const ResourceBundle &baseline_essential,
                                            const ResourceBundle &baseline_complementary) {
    return calibrate_saturation(baseline_essential.as_array(), baseline_essential,
                                baseline_complementary);
}

} // namespace hcs
