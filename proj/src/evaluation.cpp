#include "hcs/evaluation.hpp"

#include "hcs/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <numeric>

namespace hcs {

using json = nlohmann::json;

namespace {

struct NamedValue {
    const char *name;
    double MetricReport::*field;
};

constexpr NamedValue metric_fields[] = {
    {"l_index", &MetricReport::l_index},
    {"q_life", &MetricReport::q_life},
    {"e_life", &MetricReport::e_life},
    {"p_mr", &MetricReport::p_mr},
    {"p_ei", &MetricReport::p_ei},
    {"p_tech", &MetricReport::p_tech},
    {"p_hc", &MetricReport::p_hc},
    {"matching_degree", &MetricReport::matching_degree},
    {"fairness_degree", &MetricReport::fairness_degree},
    {"luxury_index", &MetricReport::luxury_index},
};

json to_json(const MetricReport &r) {
    json j;
    j["country"] = r.country;
    j["year"] = r.year;
    for (const auto &f : metric_fields) {
        j[f.name] = r.*f.field;
    }
    j["warnings"] = r.warnings;
    j["ensurance"] = json{{"method", r.ensurance_method},
                          {"samples", r.ensurance_samples},
                          {"seed", r.ensurance_seed},
                          {"std_error", r.ensurance_std_error}};
    return j;
}

std::string csv_field(const std::string &text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

MetricReport evaluate(const Scenario &scenario, std::optional<int> year,
                      const EvaluationOptions &options) {
    const int at = year.value_or(scenario.profile.year);
    const auto profile = profile_for_year(scenario.profile, at);
    const auto &coeffs = scenario.coefficients;

    MetricReport r;
    r.country = profile.name;
    r.year = at;

    r.p_mr = practical_effect(profile.essential, profile.complementary, scenario.saturation);
    const double r_essential = resource_product(profile.essential, scenario.saturation.k_essential);
    const double r_complementary =
        resource_product(profile.complementary, scenario.saturation.k_complementary);

    const auto model = profile.population_model();
    if (options.quadrature) {
        r.p_ei = perfect_ensurance_quadrature(model);
        r.ensurance_method = "quadrature";
    } else {
        const auto est = perfect_ensurance_mc(model, options.samples, options.seed, options.workers);
        r.p_ei = est.p_ei;
        r.ensurance_method = "monte_carlo";
        r.ensurance_samples = est.n_samples;
        r.ensurance_seed = est.seed;
        r.ensurance_std_error = est.std_error;
    }

    const auto &current = profile.research.at(at, coeffs.miss_policy);
    r.p_hc = potential_of_health_care(current.staff, current.funding, coeffs);
    r.p_tech = power_of_tech(profile.research, at, coeffs);

    r.e_life = life_expectancy(r.p_hc, coeffs);
    r.q_life = quality_of_life(r.p_mr, r.p_ei, r.p_tech, coeffs);
    r.l_index = life_index(r.q_life, r.e_life);

    const auto matching = matching_degree({profile.per_capita_gdp, r.l_index});
    r.matching_degree = matching.value;
    if (matching.out_of_regime) {
        r.warnings.push_back("matching_degree: life index exceeds per-capita GDP; value is "
                             "negative and likely reflects a unit or calibration mismatch");
    }
    r.fairness_degree = fairness_degree(profile.urban_rural);
    r.luxury_index = luxury_index({r_essential, r_complementary, r.p_ei, r.p_hc});
    if (profile.synthetic) {
        r.warnings.push_back("profile is synthetic demonstration data");
    }
    return r;
}

int earliest_computable_year(const Scenario &scenario) {
    return scenario.profile.research.first_year() + scenario.coefficients.tau;
}

HistoryResult history(const Scenario &scenario, int first, int last, bool strict,
                      const EvaluationOptions &options) {
    if (first > last) {
        throw DomainError("history range is empty: " + std::to_string(first) + " > " +
                          std::to_string(last));
    }
    HistoryResult out;
    for (int year = first; year <= last; ++year) {
        try {
            out.rows.push_back(evaluate(scenario, year, options));
        } catch (const LookupError &e) {
            if (strict) {
                std::string msg = std::string{e.what()} + " (while evaluating " +
                                  std::to_string(year) + ")";
                if (!scenario.profile.research.empty()) {
                    msg += "; earliest computable year is " +
                           std::to_string(earliest_computable_year(scenario));
                }
                throw LookupError(msg, year);
            }
            out.warnings.push_back("skipped " + std::to_string(year) + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::size_t> rank_by_life_index(const std::vector<MetricReport> &reports) {
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), 0);
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
        return reports[a].l_index > reports[b].l_index;
    });
    std::vector<std::size_t> ranks(reports.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        ranks[order[pos]] = pos + 1;
    }
    return ranks;
}

std::string report_json(const MetricReport &report) { return to_json(report).dump(2) + "\n"; }

std::string reports_json(const std::vector<MetricReport> &reports,
                         const std::vector<std::size_t> &ranks) {
    json arr = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        auto j = to_json(reports[i]);
        if (!ranks.empty()) {
            j["rank"] = ranks[i];
        }
        arr.push_back(std::move(j));
    }
    return json{{"reports", arr}}.dump(2) + "\n";
}

std::string reports_csv(const std::vector<MetricReport> &reports,
                        const std::vector<std::size_t> &ranks) {
    std::string out = "country,year";
    for (const auto &f : metric_fields) {
        out += ",";
        out += f.name;
    }
    if (!ranks.empty()) {
        out += ",rank";
    }
    out += "\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto &r = reports[i];
        out += csv_field(r.country) + "," + std::to_string(r.year);
        for (const auto &f : metric_fields) {
            out += "," + format_number(r.*f.field);
        }
        if (!ranks.empty()) {
            out += "," + std::to_string(ranks[i]);
        }
        out += "\n";
    }
    return out;
}

std::string reports_long_csv(const std::vector<MetricReport> &reports) {
    std::string out = "country,year,metric,value\n";
    for (const auto &r : reports) {
        for (const auto &f : metric_fields) {
            out += csv_field(r.country) + "," + std::to_string(r.year) + "," + f.name + "," +
                   format_number(r.*f.field) + "\n";
        }
    }
    return out;
}

std::string plan_json(const OptimizationResult &result, const AllocationProblem &prob) {
    auto plan_obj = [](const AllocationPlan &p) {
        json allocation;
        for (int c = 1; c <= static_cast<int>(category_count); ++c) {
            allocation[category_name(c)] = p.x(c);
        }
        return json{{"solver", solver_name(p.solver)},
                    {"objective", p.objective},
                    {"feasible", p.feasible},
                    {"iterations", p.iterations},
                    {"components",
                     {{"p_ei", p.components.p_ei}, {"p_mr", p.components.p_mr}, {"p_hc", p.components.p_hc}}},
                    {"allocation", allocation},
                    {"f", std::vector<double>(p.x.f.begin(), p.x.f.end())}};
    };
    json doc = plan_obj(result.plan);
    doc["budget"] = prob.f_total;
    doc["aid_cap"] = aid_cap(prob);
    doc["baseline"] = std::vector<double>(prob.baseline.f.begin(), prob.baseline.f.end());
    json diag;
    diag["step"] = result.step;
    diag["uniform_objective"] = result.uniform.objective;
    if (result.greedy) {
        diag["greedy_objective"] = result.greedy->objective;
        diag["greedy_rounds"] = result.greedy->iterations;
    }
    diag["p_uninsure"] = prob.p_uninsure;
    diag["e_indicator"] = prob.e_indicator;
    doc["diagnostics"] = diag;
    return doc.dump(2) + "\n";
}

} // namespace hcs
