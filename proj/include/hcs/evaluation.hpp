#pragma once

#include "hcs/allocator.hpp"
#include "hcs/profiles_io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hcs {

/// Every index computed for one country-year.
struct MetricReport {
    std::string country;
    int year{};
    double l_index{};
    double q_life{};
    double e_life{};
    double p_mr{};
    double p_ei{};
    double p_tech{};
    double p_hc{};
    double matching_degree{};
    double fairness_degree{};
    double luxury_index{};
    std::vector<std::string> warnings;

    // How p_ei was obtained.
    std::string ensurance_method;
    std::size_t ensurance_samples{0};
    std::uint64_t ensurance_seed{0};
    double ensurance_std_error{0.0};
};

struct EvaluationOptions {
    std::size_t samples{1'000'000};
    std::uint64_t seed{42};
    bool quadrature{false};
    unsigned workers{0};
};

/// Evaluates the scenario's profile at `year` (the profile's base year when unset).
MetricReport evaluate(const Scenario &scenario, std::optional<int> year = std::nullopt,
                      const EvaluationOptions &options = {});

/// Earliest year whose P_tech lookup is covered by the research series.
int earliest_computable_year(const Scenario &scenario);

struct HistoryResult {
    std::vector<MetricReport> rows;
    std::vector<std::string> warnings;
};

/// One report per year of [first, last]. Strict mode throws LookupError on the first gap
/// (naming the earliest computable year); lenient mode skips the year with a warning.
HistoryResult history(const Scenario &scenario, int first, int last, bool strict,
                      const EvaluationOptions &options = {});

/// 1-based ranks by descending l_index; ties keep input order.
std::vector<std::size_t> rank_by_life_index(const std::vector<MetricReport> &reports);

/// Canonical JSON text (sorted keys, shortest round-trip numbers), newline-terminated.
std::string report_json(const MetricReport &report);
std::string reports_json(const std::vector<MetricReport> &reports,
                         const std::vector<std::size_t> &ranks = {});

/// Wide CSV: one row per report, one column per metric (plus rank when given).
std::string reports_csv(const std::vector<MetricReport> &reports,
                        const std::vector<std::size_t> &ranks = {});

/// Long CSV for plotting: country,year,metric,value.
std::string reports_long_csv(const std::vector<MetricReport> &reports);

struct OptimizationResult {
    AllocationPlan plan;
    std::optional<AllocationPlan> greedy;
    AllocationPlan uniform;
    double step{};
};

std::string plan_json(const OptimizationResult &result, const AllocationProblem &prob);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

} // namespace hcs
