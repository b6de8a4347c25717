#include "hcs/allocator.hpp"

#include "hcs/ensurance.hpp"
#include "hcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hcs {

namespace {

constexpr int aid = static_cast<int>(Category::patient_aid);

const std::vector<std::vector<int>> &product_groups() {
    static const std::vector<std::vector<int>> groups{{2, 3}, {4, 5, 6}, {7, 8, 9}};
    return groups;
}

void require(bool ok, const std::string &msg) {
    if (!ok) {
        throw DomainError("allocation problem: " + msg);
    }
}

bool contains(const CategorySet &dims, int category) {
    return std::ranges::find(dims, category) != dims.end();
}

void validate_dims(const CategorySet &dims) {
    if (dims.empty()) {
        throw DomainError("category set must not be empty");
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 1 || dims[i] > static_cast<int>(category_count)) {
            throw DomainError("category " + std::to_string(dims[i]) + " is outside 1..9");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (dims[i] == dims[j]) {
                throw DomainError("category " + std::to_string(dims[i]) + " listed twice");
            }
        }
    }
}

/// Room left for patient aid on top of the baseline.
double aid_room(const AllocationProblem &prob) {
    const double cap = aid_cap(prob);
    double room = cap - prob.baseline(aid);
    if (room < 0.0) {
        throw ConstraintError("baseline patient aid already exceeds the cap " + std::to_string(cap) +
                              " (aid_cap_fraction * f_med)");
    }
    // baseline + room must not round above the cap
    while (room > 0.0 && prob.baseline(aid) + room > cap) {
        room = std::nextafter(room, 0.0);
    }
    return room;
}

double evaluate(const ExpenditureVector &x, const AllocationProblem &prob) {
    return objective(prob.baseline + x, prob);
}

/// Pushes the rounding residual of sum(x) - f_total into the largest non-aid category.
void settle_budget(ExpenditureVector &x, const AllocationProblem &prob, const CategorySet &dims) {
    int target = -1;
    for (int c : dims) {
        if (c != aid && (target < 0 || x(c) > x(target))) {
            target = c;
        }
    }
    if (target < 0) {
        target = dims.front();
    }
    for (int pass = 0; pass < 4; ++pass) {
        const double diff = prob.f_total - x.sum();
        if (diff == 0.0) {
            break;
        }
        x(target) = std::max(0.0, x(target) + diff);
    }
}

void require_budget_room(const AllocationProblem &prob, const CategorySet &dims) {
    if (dims.size() == 1 && dims.front() == aid && prob.f_total > aid_room(prob)) {
        throw ConstraintError("budget exceeds the patient-aid cap and no other category is allowed");
    }
}

} // namespace

const char *category_name(int category) {
    static constexpr const char *names[category_count] = {
        "patient_aid",           "research_salaries",     "research_funding",
        "essential_doctors",     "essential_nurses",      "essential_equipment",
        "complementary_doctors", "complementary_nurses",  "complementary_equipment"};
    if (category < 1 || category > static_cast<int>(category_count)) {
        return "unknown";
    }
    return names[category - 1];
}

const char *solver_name(Solver solver) {
    switch (solver) {
    case Solver::greedy:
        return "greedy";
    case Solver::ascent:
        return "ascent";
    case Solver::grid:
        return "grid";
    case Solver::uniform:
        return "uniform";
    }
    return "unknown";
}

double ExpenditureVector::sum() const noexcept {
    return std::accumulate(f.begin(), f.end(), 0.0);
}

ExpenditureVector operator+(const ExpenditureVector &a, const ExpenditureVector &b) {
    ExpenditureVector out;
    for (std::size_t i = 0; i < category_count; ++i) {
        out.f[i] = a.f[i] + b.f[i];
    }
    return out;
}

CategorySet all_categories() { return {1, 2, 3, 4, 5, 6, 7, 8, 9}; }

void validate(const AllocationProblem &prob) {
    require(std::isfinite(prob.f_total) && prob.f_total > 0.0, "f_total must be > 0");
    require(std::isfinite(prob.f_med) && prob.f_med > 0.0, "f_med must be > 0");
    require(std::isfinite(prob.f_income) && prob.f_income >= 0.0, "f_income must be >= 0");
    require(prob.p_uninsure >= 0.0 && prob.p_uninsure <= 1.0, "p_uninsure must lie in [0, 1]");
    require(prob.e_indicator >= 0.0 && prob.e_indicator <= 1.0, "e_indicator must lie in [0, 1]");
    require(std::isfinite(prob.s_salary) && prob.s_salary > 0.0, "s_salary must be > 0");
    for (std::size_t i = 0; i < 3; ++i) {
        require(std::isfinite(prob.n_unit_essential[i]) && prob.n_unit_essential[i] > 0.0,
                "n_unit_essential entries must be > 0");
        require(std::isfinite(prob.n_unit_complementary[i]) && prob.n_unit_complementary[i] > 0.0,
                "n_unit_complementary entries must be > 0");
    }
    for (double v : prob.baseline.f) {
        require(std::isfinite(v) && v >= 0.0, "baseline spending must be >= 0");
    }
    require(prob.aid_cap_fraction > 0.0 && prob.aid_cap_fraction < 1.0,
            "aid_cap_fraction must lie in (0, 1)");
    validate(prob.coeffs);
    validate(prob.sat);
}

double aid_cap(const AllocationProblem &prob) { return prob.aid_cap_fraction * prob.f_med; }

std::array<double, category_count> half_saturation_levels(const AllocationProblem &prob) {
    std::array<double, category_count> h{};
    h[0] = prob.f_med;
    h[1] = prob.coeffs.k_N * prob.s_salary;
    h[2] = prob.coeffs.k_M;
    for (std::size_t i = 0; i < 3; ++i) {
        h[3 + i] = prob.n_unit_essential[i] * prob.sat.k_essential[i];
        h[6 + i] = prob.n_unit_complementary[i] * prob.sat.k_complementary[i];
    }
    return h;
}

double p_ei_of(const ExpenditureVector &x, const AllocationProblem &prob) {
    if (x(aid) > aid_cap(prob)) {
        throw ConstraintError("patient aid " + std::to_string(x(aid)) + " exceeds the cap " +
                              std::to_string(aid_cap(prob)) + " (0.95 * f_med)");
    }
    return perfect_ensurance_closed(prob.f_income, prob.f_med, x(aid), prob.p_uninsure,
                                    prob.e_indicator);
}

double p_hc_of(const ExpenditureVector &x, const AllocationProblem &prob) {
    return saturating_share(x(2), prob.coeffs.k_N * prob.s_salary) *
           saturating_share(x(3), prob.coeffs.k_M);
}

double p_mr_of(const ExpenditureVector &x, const AllocationProblem &prob) {
    double essential = 1.0;
    double complementary = 1.0;
    for (int i = 0; i < 3; ++i) {
        const auto u = static_cast<std::size_t>(i);
        essential *= saturating_share(x(4 + i), prob.n_unit_essential[u] * prob.sat.k_essential[u]);
        complementary *=
            saturating_share(x(7 + i), prob.n_unit_complementary[u] * prob.sat.k_complementary[u]);
    }
    return essential + complementary;
}

double objective(const ExpenditureVector &x, const AllocationProblem &prob) {
    const double p_ei = p_ei_of(x, prob);
    const double p_mr = p_mr_of(x, prob);
    const double p_hc = p_hc_of(x, prob);
    return (p_ei + p_mr + p_hc) * (prob.coeffs.E_0 + prob.coeffs.k_lt * p_hc) / prob.coeffs.k_q;
}

AllocationPlan make_plan(const ExpenditureVector &x, const AllocationProblem &prob, Solver solver,
                         std::size_t iterations) {
    AllocationPlan plan;
    plan.x = x;
    plan.solver = solver;
    plan.iterations = iterations;
    const auto total = prob.baseline + x;
    plan.components = {p_ei_of(total, prob), p_mr_of(total, prob), p_hc_of(total, prob)};
    plan.objective = objective(total, prob);
    const bool nonnegative = std::ranges::all_of(x.f, [](double v) { return v >= 0.0; });
    plan.feasible = nonnegative && std::abs(x.sum() - prob.f_total) <= prob.f_total * 1e-12 &&
                    x(aid) <= aid_cap(prob) && total(aid) <= aid_cap(prob);
    return plan;
}

AllocationPlan uniform_allocate(const AllocationProblem &prob, const CategorySet &dims) {
    validate(prob);
    validate_dims(dims);
    require_budget_room(prob, dims);
    ExpenditureVector x;
    const double share = prob.f_total / static_cast<double>(dims.size());
    const double room = aid_room(prob);
    if (contains(dims, aid) && share > room) {
        x(aid) = room;
        const double rest = (prob.f_total - room) / static_cast<double>(dims.size() - 1);
        for (int c : dims) {
            if (c != aid) {
                x(c) = rest;
            }
        }
    } else {
        for (int c : dims) {
            x(c) = share;
        }
    }
    settle_budget(x, prob, dims);
    return make_plan(x, prob, Solver::uniform, 0);
}

AllocationPlan greedy_allocate(const AllocationProblem &prob, double step, const CategorySet &dims) {
    validate(prob);
    validate_dims(dims);
    if (!std::isfinite(step) || step <= 0.0) {
        throw DomainError("greedy step must be > 0");
    }
    if (step > prob.f_total * (1.0 + 1e-12)) {
        throw DomainError("greedy step must not exceed the budget");
    }
    require_budget_room(prob, dims);
    const double room = aid_room(prob);

    std::vector<std::vector<int>> groups;
    for (const auto &g : product_groups()) {
        std::vector<int> members;
        std::ranges::copy_if(g, std::back_inserter(members),
                             [&](int c) { return contains(dims, c); });
        if (members.size() >= 2) {
            groups.push_back(std::move(members));
        }
    }
    CategorySet singles = dims;
    std::ranges::sort(singles);
    const auto half = half_saturation_levels(prob);

    // The member with the largest d/dt log(t / (t + h)) = h / (t (t + h)) comes next.
    auto least_saturated = [&](const ExpenditureVector &x, const std::vector<int> &members) {
        int best = members.front();
        double best_level = std::numeric_limits<double>::infinity();
        for (int c : members) {
            const auto u = static_cast<std::size_t>(c - 1);
            const double t = prob.baseline(c) + x(c);
            const double level = t * (t + half[u]) / half[u];
            if (level < best_level) {
                best_level = level;
                best = c;
            }
        }
        return best;
    };

    ExpenditureVector x;
    double current = evaluate(x, prob);
    double remaining = prob.f_total;
    std::size_t rounds = 0;
    while (remaining > prob.f_total * 1e-12) {
        const double amount = std::min(step, remaining);
        const auto left = static_cast<std::size_t>(std::ceil(remaining / step - 1e-9));

        std::vector<std::size_t> horizon;
        for (std::size_t m = 1; m <= std::min<std::size_t>(8, left); ++m) {
            horizon.push_back(m);
        }
        for (std::size_t m = 16; m < left; m *= 2) {
            horizon.push_back(m);
        }
        if (left > 8) {
            horizon.push_back(left);
        }

        // Moves are scored by objective gain per unit of money.
        double best_score = -std::numeric_limits<double>::infinity();
        int target = -1;
        for (int c : singles) {
            for (std::size_t m : horizon) {
                double added = std::min(amount * static_cast<double>(m), remaining);
                if (c == aid) {
                    // topping aid up to the cap leaves the rest of the chunk for later
                    // rounds, so the last chunk must fit whole
                    if (left <= 1 && room - x(aid) < amount) {
                        break;
                    }
                    added = std::min(added, room - x(aid));
                }
                if (added <= 0.0) {
                    break;
                }
                ExpenditureVector y = x;
                y(c) = c == aid ? std::min(x(c) + added, room) : x(c) + added;
                const double score = (evaluate(y, prob) - current) / added;
                if (score > best_score) {
                    best_score = score;
                    target = c;
                }
                if (c == aid && x(aid) + added >= room) {
                    break;
                }
            }
        }
        for (const auto &members : groups) {
            ExpenditureVector y = x;
            const int first = least_saturated(x, members);
            std::size_t placed = 0;
            double added = 0.0;
            for (std::size_t m : horizon) {
                for (; placed < m; ++placed) {
                    const double piece = std::min(amount, remaining - added);
                    y(least_saturated(y, members)) += piece;
                    added += piece;
                }
                const double score = (evaluate(y, prob) - current) / added;
                if (score > best_score) {
                    best_score = score;
                    target = first;
                }
            }
        }
        if (target < 0) {
            throw ConstraintError("no category can absorb the next chunk under the patient-aid cap");
        }
        const double spend = target == aid ? std::min(amount, room - x(aid)) : amount;
        x(target) = target == aid ? std::min(x(aid) + spend, room) : x(target) + spend;
        remaining -= spend;
        current = evaluate(x, prob);
        ++rounds;
    }
    settle_budget(x, prob, dims);
    return make_plan(x, prob, Solver::greedy, rounds);
}

namespace {

/// Euclidean projection onto {sum over dims = total, 0 <= x_i, x_aid <= room}, zero elsewhere.
ExpenditureVector project(const ExpenditureVector &y, const AllocationProblem &prob,
                          const CategorySet &dims, double room) {
    auto upper = [&](int c) { return c == aid ? room : std::numeric_limits<double>::infinity(); };
    auto mass = [&](double shift) {
        double s = 0.0;
        for (int c : dims) {
            s += std::clamp(y(c) - shift, 0.0, upper(c));
        }
        return s;
    };
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int c : dims) {
        lo = std::min(lo, y(c));
        hi = std::max(hi, y(c));
    }
    lo -= prob.f_total;
    for (int it = 0; it < 200 && lo < hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        (mass(mid) > prob.f_total ? lo : hi) = mid;
    }
    ExpenditureVector out;
    for (int c : dims) {
        out(c) = std::clamp(y(c) - 0.5 * (lo + hi), 0.0, upper(c));
    }
    settle_budget(out, prob, dims);
    return out;
}

std::vector<double> to_vector(const ExpenditureVector &x) { return {x.f.begin(), x.f.end()}; }

} // namespace

AllocationPlan projected_ascent(const AllocationProblem &prob, const ExpenditureVector &start,
                                const AscentOptions &options) {
    validate(prob);
    validate_dims(options.dims);
    const double room = aid_room(prob);
    const double chunk = options.chunk > 0.0 ? options.chunk : prob.f_total / 300.0;
    const auto &dims = options.dims;

    for (int c = 1; c <= static_cast<int>(category_count); ++c) {
        if (start(c) < 0.0 || (!contains(dims, c) && start(c) != 0.0)) {
            throw ConstraintError("ascent start is infeasible at category " + std::to_string(c));
        }
    }
    if (std::abs(start.sum() - prob.f_total) > prob.f_total * 1e-9 || start(aid) > room) {
        throw ConstraintError("ascent start violates the budget or the patient-aid cap");
    }
    if (options.max_iters == 0) {
        return make_plan(start, prob, Solver::ascent, 0);
    }

    auto checked_eval = [&](const ExpenditureVector &v) {
        const double value = evaluate(v, prob);
        if (!std::isfinite(value)) {
            throw NumericalError("objective is not finite during ascent", to_vector(v));
        }
        return value;
    };

    ExpenditureVector x = start;
    settle_budget(x, prob, dims);
    double value = checked_eval(x);
    std::size_t iterations = 0;
    while (iterations < options.max_iters) {
        ExpenditureVector grad;
        double grad_max = 0.0;
        for (int c : dims) {
            const double h = 1e-6 * std::max(x(c), chunk);
            const bool down = x(c) - h >= 0.0;
            const bool up = c != aid || x(c) + h <= room;
            ExpenditureVector lo = x;
            ExpenditureVector hi = x;
            double width = 0.0;
            if (down) {
                lo(c) -= h;
                width += h;
            }
            if (up) {
                hi(c) += h;
                width += h;
            }
            if (width == 0.0) {
                continue;
            }
            grad(c) = (checked_eval(hi) - checked_eval(lo)) / width;
            if (!std::isfinite(grad(c))) {
                throw NumericalError("non-finite gradient component " + std::to_string(c),
                                     to_vector(x));
            }
            grad_max = std::max(grad_max, std::abs(grad(c)));
        }
        if (grad_max == 0.0) {
            break;
        }

        const double scale = prob.f_total / grad_max;
        ExpenditureVector trial;
        for (int c : dims) {
            trial(c) = x(c) + scale * grad(c);
        }
        const auto target = project(trial, prob, dims, room);
        ExpenditureVector direction;
        double predicted = 0.0;
        for (int c : dims) {
            direction(c) = target(c) - x(c);
            predicted += grad(c) * direction(c);
        }
        if (predicted <= options.tol * std::abs(value)) {
            break;
        }

        bool accepted = false;
        double beta = 1.0;
        ExpenditureVector candidate;
        double candidate_value = value;
        for (int attempt = 0; attempt < 60; ++attempt, beta *= 0.5) {
            candidate = x;
            for (int c : dims) {
                candidate(c) = std::max(0.0, x(c) + beta * direction(c));
            }
            candidate(aid) = std::min(candidate(aid), room);
            settle_budget(candidate, prob, dims);
            candidate_value = checked_eval(candidate);
            if (candidate_value >= value + 1e-4 * beta * predicted) {
                accepted = true;
                break;
            }
        }
        if (!accepted || candidate_value <= value) {
            break;
        }
        x = candidate;
        value = candidate_value;
        ++iterations;
    }
    return make_plan(x, prob, Solver::ascent, iterations);
}

double composition_count(std::size_t chunks, std::size_t bins) {
    if (bins == 0) {
        return chunks == 0 ? 1.0 : 0.0;
    }
    // C(chunks + bins - 1, bins - 1)
    double count = 1.0;
    for (std::size_t i = 1; i < bins; ++i) {
        count = count * static_cast<double>(chunks + i) / static_cast<double>(i);
    }
    return std::round(count);
}

AllocationPlan grid_oracle(const AllocationProblem &prob, const CategorySet &dims, std::size_t chunks,
                           std::size_t max_compositions) {
    validate(prob);
    validate_dims(dims);
    if (dims.size() > 4) {
        throw ResourceError("grid oracle supports at most 4 categories, got " +
                            std::to_string(dims.size()));
    }
    if (chunks == 0) {
        throw DomainError("grid oracle needs at least one chunk");
    }
    const double total = composition_count(chunks, dims.size());
    if (total > static_cast<double>(max_compositions)) {
        throw ResourceError("grid oracle would enumerate " + std::to_string(total) +
                            " compositions (limit " + std::to_string(max_compositions) + ")");
    }
    const double room = aid_room(prob);
    const double chunk = prob.f_total / static_cast<double>(chunks);

    std::vector<std::size_t> counts(dims.size(), 0);
    std::vector<std::size_t> best_counts;
    ExpenditureVector best_x;
    double best_value = -std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0;

    // Lexicographic order over the count vector; the first maximum wins ties.
    auto visit = [&](auto &&self, std::size_t pos, std::size_t left) -> void {
        if (pos + 1 == dims.size()) {
            counts[pos] = left;
            ExpenditureVector x;
            for (std::size_t i = 0; i < dims.size(); ++i) {
                x(dims[i]) = static_cast<double>(counts[i]) * chunk;
            }
            settle_budget(x, prob, dims);
            if (x(aid) > room) {
                return;
            }
            ++evaluated;
            const double value = evaluate(x, prob);
            if (value > best_value) {
                best_value = value;
                best_counts = counts;
                best_x = x;
            }
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            counts[pos] = c;
            self(self, pos + 1, left - c);
        }
    };
    visit(visit, 0, chunks);
    if (best_counts.empty()) {
        throw ConstraintError("every composition violates the patient-aid cap");
    }
    return make_plan(best_x, prob, Solver::grid, evaluated);
}

} // namespace hcs
