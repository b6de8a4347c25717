// Command-line front end: evaluate, compare, history, optimize.
//
// Exit codes: 0 success, 1 input or validation failure (including usage errors),
// 2 numerical, singularity or constraint failure.

#include "hcs/allocator.hpp"
#include "hcs/errors.hpp"
#include "hcs/evaluation.hpp"
#include "hcs/profiles_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_input = 1;
constexpr int exit_numerical = 2;

int report_error(const std::string &kind, const std::string &message, int code,
                 const std::vector<hcs::ValidationIssue> &issues = {}) {
    json err{{"kind", kind}, {"message", message}, {"exit_code", code}};
    if (!issues.empty()) {
        json list = json::array();
        for (const auto &i : issues) {
            list.push_back({{"path", i.path}, {"message", i.message}});
        }
        err["issues"] = list;
    }
    std::cerr << json{{"error", err}}.dump(2) << "\n";
    return code;
}

/// Relative scenario paths that do not exist here are looked up under $HCS_CONFIG_DIR.
fs::path resolve_input(const std::string &arg) {
    fs::path p{arg};
    if (p.is_relative() && !fs::exists(p)) {
        if (const char *dir = std::getenv("HCS_CONFIG_DIR")) {
            auto alt = fs::path{dir} / p;
            if (fs::exists(alt)) {
                return alt;
            }
        }
    }
    return p;
}

void emit(const std::string &content, const std::string &out) {
    if (out.empty()) {
        std::cout << content;
    } else {
        hcs::write_file_atomic(out, content);
    }
}

void print_warnings(const hcs::MetricReport &r) {
    for (const auto &w : r.warnings) {
        std::cerr << "warning: " << r.country << " " << r.year << ": " << w << "\n";
    }
}

std::vector<int> parse_dims(const std::string &text) {
    std::vector<int> dims;
    std::stringstream ss{text};
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            dims.push_back(std::stoi(item));
        } catch (const std::exception &) {
            throw hcs::ValidationError("--dims", "expected comma-separated categories, got '" + text + "'");
        }
    }
    return dims;
}

std::string plan_table(const hcs::AllocationPlan &plan) {
    std::ostringstream os;
    os << std::left << std::setw(26) << "category" << std::right << std::setw(18) << "amount"
       << std::setw(10) << "share" << "\n";
    const double total = plan.x.sum();
    for (int c = 1; c <= static_cast<int>(hcs::category_count); ++c) {
        os << std::left << std::setw(26) << (std::to_string(c) + " " + hcs::category_name(c))
           << std::right << std::setw(18) << std::fixed << std::setprecision(3) << plan.x(c)
           << std::setw(9) << std::setprecision(2) << (total > 0 ? 100.0 * plan.x(c) / total : 0.0)
           << "%\n";
    }
    os << std::setprecision(9) << "objective (L_index) " << plan.objective << "  p_ei "
       << plan.components.p_ei << "  p_mr " << plan.components.p_mr << "  p_hc "
       << plan.components.p_hc << "\n"
       << "solver " << hcs::solver_name(plan.solver) << ", iterations " << plan.iterations
       << ", feasible " << (plan.feasible ? "yes" : "no") << "\n";
    return os.str();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Health-care system evaluation and budget allocation"};
    app.require_subcommand(1);

    hcs::EvaluationOptions eval_options;
    std::string out;
    auto add_sampling = [&](CLI::App *cmd) {
        cmd->add_option("--samples", eval_options.samples, "Monte Carlo samples for P_ei")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", eval_options.seed, "Monte Carlo seed");
        cmd->add_flag("--quadrature", eval_options.quadrature,
                      "Compute P_ei by deterministic quadrature instead of Monte Carlo");
    };

    auto *evaluate = app.add_subcommand("evaluate", "Compute every metric for one scenario");
    std::string scenario_arg;
    std::optional<int> year;
    evaluate->add_option("scenario", scenario_arg, "Scenario file")->required();
    evaluate->add_option("--year", year, "Year to evaluate (default: profile base year)");
    evaluate->add_option("--out", out, "Write the JSON report here instead of stdout");
    add_sampling(evaluate);

    auto *compare = app.add_subcommand("compare", "Compare scenarios and rank by life index");
    std::vector<std::string> scenario_args;
    compare->add_option("scenarios", scenario_args, "Two or more scenario files")->required();
    compare->add_option("--out", out,
                        "Output prefix: writes PREFIX.csv, PREFIX.json and PREFIX_long.csv");
    add_sampling(compare);

    auto *hist = app.add_subcommand("history", "Evaluate a range of years");
    int first_year = 0;
    int last_year = 0;
    bool lenient = false;
    hist->add_option("scenario", scenario_arg, "Scenario file")->required();
    hist->add_option("--from", first_year, "First year")->required();
    hist->add_option("--to", last_year, "Last year (inclusive)")->required();
    auto *strict_flag = hist->add_flag("--strict", "Fail on the first uncovered year (default)");
    hist->add_flag("--lenient", lenient, "Skip uncovered years with a warning")->excludes(strict_flag);
    hist->add_option("--out", out, "Write CSV here instead of stdout");
    add_sampling(hist);

    auto *optimize = app.add_subcommand("optimize", "Allocate a budget over the nine categories");
    std::optional<double> budget;
    std::optional<double> step;
    std::string solver = "refine";
    std::string dims_arg = "1,2,3";
    std::size_t chunks = 10;
    std::size_t max_iters = 2000;
    optimize->add_option("scenario", scenario_arg, "Scenario file with an allocation block")->required();
    optimize->add_option("--budget", budget, "Budget in the scenario currency unit")
        ->check(CLI::PositiveNumber);
    optimize
        ->add_option("--solver", solver,
                     "refine (greedy then ascent), greedy, ascent (from the even split) or grid")
        ->check(CLI::IsMember({"refine", "greedy", "ascent", "grid"}));
    optimize->add_option("--step", step, "Greedy chunk size (default: budget / 300)")
        ->check(CLI::PositiveNumber);
    optimize->add_option("--dims", dims_arg, "Grid solver categories, e.g. 1,2,3");
    optimize->add_option("--chunks", chunks, "Grid solver chunk count");
    optimize->add_option("--max-iters", max_iters, "Ascent iteration limit");
    optimize->add_option("--out", out, "Write the plan JSON here (table goes to stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (evaluate->parsed()) {
            const auto scenario = hcs::load_scenario(resolve_input(scenario_arg));
            const auto report = hcs::evaluate(scenario, year, eval_options);
            print_warnings(report);
            emit(hcs::report_json(report), out);
        } else if (compare->parsed()) {
            if (scenario_args.size() < 2) {
                return report_error("usage", "compare needs at least two scenarios", exit_input);
            }
            std::vector<hcs::MetricReport> reports;
            for (const auto &arg : scenario_args) {
                try {
                    const auto scenario = hcs::load_scenario(resolve_input(arg));
                    reports.push_back(hcs::evaluate(scenario, std::nullopt, eval_options));
                    print_warnings(reports.back());
                } catch (const std::exception &e) {
                    std::cerr << "error: while processing " << arg << "\n";
                    throw;
                }
            }
            const auto ranks = hcs::rank_by_life_index(reports);
            if (out.empty()) {
                std::cout << hcs::reports_csv(reports, ranks);
            } else {
                hcs::write_file_atomic(out + ".csv", hcs::reports_csv(reports, ranks));
                hcs::write_file_atomic(out + ".json", hcs::reports_json(reports, ranks));
                hcs::write_file_atomic(out + "_long.csv", hcs::reports_long_csv(reports));
            }
        } else if (hist->parsed()) {
            const auto scenario = hcs::load_scenario(resolve_input(scenario_arg));
            const auto result =
                hcs::history(scenario, first_year, last_year, !lenient, eval_options);
            for (const auto &w : result.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            emit(hcs::reports_csv(result.rows), out);
        } else if (optimize->parsed()) {
            const auto scenario = hcs::load_scenario(resolve_input(scenario_arg));
            const auto prob = hcs::make_allocation_problem(scenario, budget);
            hcs::OptimizationResult result;
            result.step = step.value_or(scenario.allocation->step.value_or(prob.f_total / 300.0));
            result.uniform = hcs::uniform_allocate(prob);
            hcs::AscentOptions ascent;
            ascent.max_iters = max_iters;
            ascent.chunk = result.step;
            if (solver == "grid") {
                result.plan = hcs::grid_oracle(prob, parse_dims(dims_arg), chunks);
            } else if (solver == "ascent") {
                result.plan = hcs::projected_ascent(prob, result.uniform.x, ascent);
            } else {
                result.greedy = hcs::greedy_allocate(prob, result.step);
                result.plan = solver == "greedy"
                                  ? *result.greedy
                                  : hcs::projected_ascent(prob, result.greedy->x, ascent);
            }
            if (!result.plan.feasible) {
                return report_error("constraint", "solver returned an infeasible plan", exit_numerical);
            }
            const auto doc = hcs::plan_json(result, prob);
            if (out.empty()) {
                std::cout << doc;
                std::cerr << plan_table(result.plan);
            } else {
                hcs::write_file_atomic(out, doc);
                std::cout << plan_table(result.plan);
            }
        }
    } catch (const hcs::ValidationError &e) {
        return report_error("validation", e.what(), exit_input, e.issues());
    } catch (const hcs::ParseError &e) {
        return report_error("parse", e.what(), exit_input);
    } catch (const hcs::IoError &e) {
        return report_error("io", e.what(), exit_input);
    } catch (const hcs::LookupError &e) {
        return report_error("lookup", e.what(), exit_input);
    } catch (const hcs::SingularityError &e) {
        return report_error("singularity", e.what(), exit_numerical);
    } catch (const hcs::DomainError &e) {
        return report_error("domain", e.what(), exit_numerical);
    } catch (const hcs::ConstraintError &e) {
        return report_error("constraint", e.what(), exit_numerical);
    } catch (const hcs::NumericalError &e) {
        return report_error("numerical", e.what(), exit_numerical);
    } catch (const hcs::ResourceError &e) {
        return report_error("resource", e.what(), exit_numerical);
    } catch (const std::exception &e) {
        return report_error("internal", e.what(), exit_numerical);
    }
    return 0;
}
