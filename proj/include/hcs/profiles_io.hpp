#pragma once

#include "hcs/allocator.hpp"
#include "hcs/ensurance.hpp"
#include "hcs/model_core.hpp"
#include "hcs/subordinate_metrics.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hcs {

/// Unit declarations carried in every profile document header.
struct Units {
    /// Aggregate money: research funding, budgets, k_M.
    std::string currency{"USD_millions"};
    /// Per-person money: GDP per capita and the population model.
    std::string per_capita_currency{"USD"};
    std::string resource_basis{"per_1000"};

    bool operator==(const Units &) const = default;
};

struct InsuranceCounts {
    double n_insured{};
    double n_uninsured{};

    bool operator==(const InsuranceCounts &) const = default;
};

/// Per-person expenditure and income distribution; coverage comes from InsuranceCounts.
struct IncomeModel {
    double lambda_med{1.0};
    double mu_inc{0.0};
    double sigma_inc{1.0};
    double essential_expense{0.0};
    double k_gov{0.0};
    double money_quantum{1.0};

    bool operator==(const IncomeModel &) const = default;
};

/// Values that differ from the base year. Unset fields inherit the base profile.
struct YearRecord {
    int year{};
    std::optional<double> population;
    std::optional<double> per_capita_gdp;
    std::optional<ResourceBundle> essential;
    std::optional<ResourceBundle> complementary;
    std::optional<InsuranceCounts> insurance;
    std::optional<IncomeModel> income;
    std::optional<UrbanRuralSplit> urban_rural;

    bool operator==(const YearRecord &) const = default;
};

struct CountryProfile {
    std::string name;
    int year{};
    double population{};
    double per_capita_gdp{};
    ResourceBundle essential;
    ResourceBundle complementary;
    InsuranceCounts insurance;
    IncomeModel income;
    ResearchSeries research;
    UrbanRuralSplit urban_rural;
    Units units;
    bool synthetic{false};
    std::string notes;
    std::vector<YearRecord> history;

    PopulationModel population_model() const;

    bool operator==(const CountryProfile &) const = default;
};

/// The profile as it stood in `year`. Throws LookupError when the year is neither the
/// base year nor listed in the history.
CountryProfile profile_for_year(const CountryProfile &profile, int year);

/// Allocation parameters as written in a scenario. Unset optionals are derived from the profile.
struct AllocationSpec {
    std::optional<double> f_total;
    double f_med{};
    double f_income{};
    std::optional<double> p_uninsure;
    std::optional<double> e_indicator;
    double s_salary{};
    std::array<double, 3> n_unit_essential{};
    std::array<double, 3> n_unit_complementary{};
    ExpenditureVector baseline{};
    double aid_cap_fraction{0.95};
    std::optional<double> step;

    bool operator==(const AllocationSpec &) const = default;
};

struct Scenario {
    std::string profile_ref;
    std::filesystem::path profile_path;
    CountryProfile profile;
    ModelCoefficients coefficients;
    SaturationCoefficients saturation;
    /// True when k_complementary was derived from the base profile.
    bool saturation_calibrated{false};
    std::optional<AllocationSpec> allocation;
    std::map<std::string, std::string> metadata;
};

struct LoadOptions {
    std::string expected_currency{"USD_millions"};
};

CountryProfile load_profile(const std::filesystem::path &path, const LoadOptions &options = {});
CountryProfile parse_profile(const std::string &text, const LoadOptions &options = {});

void save_profile(const CountryProfile &profile, const std::filesystem::path &path);
/// Canonical document text: sorted keys, shortest round-trip number formatting.
std::string dump_profile(const CountryProfile &profile);

Scenario load_scenario(const std::filesystem::path &path, const LoadOptions &options = {});

/// Builds the allocation program for a scenario. `budget` overrides the scenario's f_total.
AllocationProblem make_allocation_problem(const Scenario &scenario,
                                          std::optional<double> budget = std::nullopt);

/// Writes through a temporary file in the same directory followed by a rename.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

} // namespace hcs
