#pragma once

#include "hcs/model_core.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace hcs {

/// Budget categories, numbered 1..9 as in the expenditure table.
enum class Category : int {
    patient_aid = 1,
    research_salaries = 2,
    research_funding = 3,
    essential_doctors = 4,
    essential_nurses = 5,
    essential_equipment = 6,
    complementary_doctors = 7,
    complementary_nurses = 8,
    complementary_equipment = 9,
};

inline constexpr std::size_t category_count = 9;

const char *category_name(int category);

/// Nine-way spending vector. Indexing with operator() is 1-based to match category numbers.
struct ExpenditureVector {
    std::array<double, category_count> f{};

    double &operator()(int category) { return f.at(static_cast<std::size_t>(category - 1)); }
    double operator()(int category) const { return f.at(static_cast<std::size_t>(category - 1)); }
    double sum() const noexcept;

    bool operator==(const ExpenditureVector &) const = default;
};

ExpenditureVector operator+(const ExpenditureVector &a, const ExpenditureVector &b);

struct AllocationProblem {
    double f_total{};
    double f_med{};
    double f_income{};
    double p_uninsure{};
    double e_indicator{};
    double s_salary{1.0};
    std::array<double, 3> n_unit_essential{1.0, 1.0, 1.0};
    std::array<double, 3> n_unit_complementary{1.0, 1.0, 1.0};
    ModelCoefficients coeffs{};
    SaturationCoefficients sat{};
    /// Spending already in place; solvers distribute f_total on top of it.
    ExpenditureVector baseline{};
    /// Patient aid (baseline included) may not exceed this fraction of f_med.
    double aid_cap_fraction{0.95};
};

void validate(const AllocationProblem &prob);

/// Upper bound on total patient aid, aid_cap_fraction * f_med.
double aid_cap(const AllocationProblem &prob);

/// Money level at which each category's saturating share reaches one half
/// (k_N * S_salary, k_M, n_e,i * k_e,i, n_c,i * k_c,i). Patient aid has none and reports f_med.
std::array<double, category_count> half_saturation_levels(const AllocationProblem &prob);

/// The component terms and objective are evaluated at the full spending vector x.
double p_ei_of(const ExpenditureVector &x, const AllocationProblem &prob);
double p_hc_of(const ExpenditureVector &x, const AllocationProblem &prob);
double p_mr_of(const ExpenditureVector &x, const AllocationProblem &prob);
double objective(const ExpenditureVector &x, const AllocationProblem &prob);

enum class Solver { greedy, ascent, grid, uniform };

const char *solver_name(Solver solver);

struct PlanComponents {
    double p_ei{};
    double p_mr{};
    double p_hc{};
};

struct AllocationPlan {
    /// Allocation of f_total; the evaluated spending is baseline + x.
    ExpenditureVector x{};
    double objective{};
    PlanComponents components{};
    bool feasible{false};
    Solver solver{Solver::greedy};
    std::size_t iterations{0};
};

/// Evaluates an allocation against the problem and fills every plan field.
AllocationPlan make_plan(const ExpenditureVector &x, const AllocationProblem &prob, Solver solver,
                         std::size_t iterations);

/// 1-based category numbers; defaults to all nine.
using CategorySet = std::vector<int>;
CategorySet all_categories();

/// Even split over `dims`; patient aid is capped and its excess shared among the others.
AllocationPlan uniform_allocate(const AllocationProblem &prob, const CategorySet &dims = all_categories());

/// Greedy marginal allocation from the zero vector in chunks of `step`.
///
/// Each round spends one chunk on the move with the largest marginal gain per unit of money.
/// Moves are single-category increments plus, for the multiplicative groups (research,
/// essential, complementary), a bundle that feeds the member with the largest marginal log-share.
/// A move's gain is the best average over a short lookahead of repeated chunks so that
/// complementary factors starting at zero are not starved. Ties go to the lowest category.
AllocationPlan greedy_allocate(const AllocationProblem &prob, double step,
                               const CategorySet &dims = all_categories());

struct AscentOptions {
    std::size_t max_iters{1000};
    /// Stop when the predicted first-order gain of the projected step is below tol * |objective|.
    double tol{1e-12};
    /// Finite-difference reference chunk; 0 selects f_total / 300.
    double chunk{0.0};
    CategorySet dims{all_categories()};
};

/// Projected gradient ascent with backtracking line search over the feasible budget set.
AllocationPlan projected_ascent(const AllocationProblem &prob, const ExpenditureVector &start,
                                const AscentOptions &options = {});

/// Exhaustive search over compositions of `chunks` equal chunks into `dims` (at most 4).
/// Ties resolve to the lexicographically smallest chunk-count vector.
AllocationPlan grid_oracle(const AllocationProblem &prob, const CategorySet &dims, std::size_t chunks,
                           std::size_t max_compositions = 10'000'000);

/// Number of ways to place `chunks` identical chunks into `bins` bins.
double composition_count(std::size_t chunks, std::size_t bins);

} // namespace hcs
