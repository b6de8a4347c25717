#pragma once

#include <array>
#include <optional>
#include <vector>

namespace hcs {

/// Resource densities per 1000 population.
struct ResourceBundle {
    double doctors{};
    double nurses{};
    double beds{};

    std::array<double, 3> as_array() const noexcept { return {doctors, nurses, beds}; }
    static ResourceBundle from_array(const std::array<double, 3> &v) noexcept {
        return {v[0], v[1], v[2]};
    }

    bool operator==(const ResourceBundle &) const = default;
};

/// Half-saturation constants for the essential and complementary resource shares.
struct SaturationCoefficients {
    std::array<double, 3> k_essential{};
    std::array<double, 3> k_complementary{};

    bool operator==(const SaturationCoefficients &) const = default;
};

struct ResearchEntry {
    int year{};
    double staff{};
    double funding{};

    bool operator==(const ResearchEntry &) const = default;
};

/// How a research-series lookup treats a year that has no entry.
enum class SeriesMissPolicy {
    strict,       ///< throw LookupError
    nearest_prior ///< fall back to the latest entry before the requested year
};

/// Yearly research staff and funding, ordered by strictly increasing year.
class ResearchSeries {
  public:
    ResearchSeries() = default;
    /// Throws DomainError when years are not strictly increasing or values are negative.
    explicit ResearchSeries(std::vector<ResearchEntry> entries);

    const std::vector<ResearchEntry> &entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    int first_year() const;
    int last_year() const;

    const ResearchEntry &at(int year, SeriesMissPolicy policy = SeriesMissPolicy::strict) const;
    std::optional<ResearchEntry> find(int year) const;

    bool operator==(const ResearchSeries &) const = default;

  private:
    std::vector<ResearchEntry> entries_;
};

struct ModelCoefficients {
    double k_q{4.0};
    double k_N{1.0};
    double k_M{1.0};
    /// Demonstration default; not a calibrated value.
    double E_0{70.0};
    /// Demonstration default; not a calibrated value.
    double k_lt{10.0};
    int tau{25};
    SeriesMissPolicy miss_policy{SeriesMissPolicy::strict};

    bool operator==(const ModelCoefficients &) const = default;
};

void validate(const ResourceBundle &bundle);
void validate(const SaturationCoefficients &coeffs);
void validate(const ModelCoefficients &coeffs);

/// x / (x + k): zero at x = 0, one half at x = k, tends to (but never reaches) one.
double saturating_share(double x, double k);

/// Product of the three saturating shares of a bundle against its constants.
double resource_product(const ResourceBundle &bundle, const std::array<double, 3> &k);

/// P_mr: essential product plus complementary product, in [0, 2).
double practical_effect(const ResourceBundle &essential, const ResourceBundle &complementary,
                        const SaturationCoefficients &coeffs);

/// P_hc from research staff head-count and research funding.
double potential_of_health_care(double staff, double funding, const ModelCoefficients &coeffs);

/// P_tech(year) = P_hc(year - tau) read from the research series.
double power_of_tech(const ResearchSeries &series, int year, const ModelCoefficients &coeffs);

/// E_life = E_0 + k_lt * p_hc.
double life_expectancy(double p_hc, const ModelCoefficients &coeffs);

/// Q_life = (p_mr + p_ei + p_tech) / k_q.
double quality_of_life(double p_mr, double p_ei, double p_tech, const ModelCoefficients &coeffs);

double life_index(double q_life, double e_life);

/// Derives k_complementary from the identity R_e,i * k_e,i = R_c,i * k_c,i on a baseline
/// profile. Throws DomainError naming the component when a baseline complementary density is 0.
SaturationCoefficients calibrate_saturation(const std::array<double, 3> &k_essential,
                                            const ResourceBundle &baseline_essential,
                                            const ResourceBundle &baseline_complementary);

/// Calibration with k_essential defaulted to the baseline essential densities, which puts
/// the baseline at half-saturation.
SaturationCoefficients calibrate_saturation(const ResourceBundle &baseline_essential,
                                            const ResourceBundle &baseline_complementary);

} // namespace hcs
