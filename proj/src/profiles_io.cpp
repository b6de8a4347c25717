#include "hcs/profiles_io.hpp"

#include "hcs/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace hcs {

using json = nlohmann::json;

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error{[&] {
          std::string msg = "validation failed:";
          for (const auto &i : issues) {
              msg += "\n  " + i.path + ": " + i.message;
          }
          return msg;
      }()},
      issues_{std::move(issues)} {}

namespace {

std::string join(const std::string &parent, const std::string &key) {
    return parent.empty() ? key : parent + "." + key;
}

std::string indexed(const std::string &parent, std::size_t i) {
    return parent + "[" + std::to_string(i) + "]";
}

/// Walks a document collecting every problem instead of stopping at the first one.
class Reader {
  public:
    std::vector<ValidationIssue> issues;

    void fail(const std::string &path, const std::string &message) {
        issues.push_back({path, message});
    }

    const json *child(const json &obj, const std::string &parent, const char *key, bool required) {
        if (!obj.is_object()) {
            return nullptr;
        }
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) {
            if (required) {
                fail(join(parent, key), "missing required field");
            }
            return nullptr;
        }
        return &*it;
    }

    const json *object(const json &obj, const std::string &parent, const char *key, bool required) {
        const json *j = child(obj, parent, key, required);
        if (j != nullptr && !j->is_object()) {
            fail(join(parent, key), "expected an object");
            return nullptr;
        }
        return j;
    }

    std::optional<double> number(const json &obj, const std::string &parent, const char *key,
                                 bool required, const std::function<bool(double)> &ok = {},
                                 const char *expectation = "") {
        const json *j = child(obj, parent, key, required);
        if (j == nullptr) {
            return std::nullopt;
        }
        if (!j->is_number()) {
            fail(join(parent, key), "expected a number");
            return std::nullopt;
        }
        const double v = j->get<double>();
        if (!std::isfinite(v) || (ok && !ok(v))) {
            fail(join(parent, key), std::string{"must be "} + expectation);
            return std::nullopt;
        }
        return v;
    }

    double number_or(const json &obj, const std::string &parent, const char *key, double fallback,
                     const std::function<bool(double)> &ok, const char *expectation) {
        return number(obj, parent, key, false, ok, expectation).value_or(fallback);
    }

    std::optional<int> integer(const json &obj, const std::string &parent, const char *key,
                               bool required) {
        const json *j = child(obj, parent, key, required);
        if (j == nullptr) {
            return std::nullopt;
        }
        if (!j->is_number_integer()) {
            fail(join(parent, key), "expected an integer");
            return std::nullopt;
        }
        return j->get<int>();
    }

    std::optional<std::string> string(const json &obj, const std::string &parent, const char *key,
                                      bool required) {
        const json *j = child(obj, parent, key, required);
        if (j == nullptr) {
            return std::nullopt;
        }
        if (!j->is_string()) {
            fail(join(parent, key), "expected a string");
            return std::nullopt;
        }
        return j->get<std::string>();
    }

    template <std::size_t N>
    std::optional<std::array<double, N>> vector(const json &obj, const std::string &parent,
                                                const char *key, bool required,
                                                const std::function<bool(double)> &ok,
                                                const char *expectation) {
        const json *j = child(obj, parent, key, required);
        if (j == nullptr) {
            return std::nullopt;
        }
        const auto path = join(parent, key);
        if (!j->is_array() || j->size() != N) {
            fail(path, "expected an array of " + std::to_string(N) + " numbers");
            return std::nullopt;
        }
        std::array<double, N> out{};
        bool good = true;
        for (std::size_t i = 0; i < N; ++i) {
            const auto &e = (*j)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>()) || !ok(e.get<double>())) {
                fail(indexed(path, i), std::string{"must be "} + expectation);
                good = false;
                continue;
            }
            out[i] = e.get<double>();
        }
        return good ? std::optional{out} : std::nullopt;
    }
};

const auto nonnegative = [](double v) { return v >= 0.0; };
const auto positive = [](double v) { return v > 0.0; };
const auto unit_interval = [](double v) { return v >= 0.0 && v <= 1.0; };

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw IoError("cannot open file", path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json parse_document(const std::string &text, const std::string &origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": malformed document: " + e.what());
    }
}

std::optional<ResourceBundle> read_bundle(Reader &r, const json &obj, const std::string &parent,
                                          const char *key, bool required) {
    const json *j = r.object(obj, parent, key, required);
    if (j == nullptr) {
        return std::nullopt;
    }
    const auto path = join(parent, key);
    const auto d = r.number(*j, path, "doctors", true, nonnegative, ">= 0");
    const auto n = r.number(*j, path, "nurses", true, nonnegative, ">= 0");
    const auto b = r.number(*j, path, "beds", true, nonnegative, ">= 0");
    if (!d || !n || !b) {
        return std::nullopt;
    }
    return ResourceBundle{*d, *n, *b};
}

std::optional<InsuranceCounts> read_insurance(Reader &r, const json &obj, const std::string &parent,
                                              bool required) {
    const json *j = r.object(obj, parent, "insurance", required);
    if (j == nullptr) {
        return std::nullopt;
    }
    const auto path = join(parent, "insurance");
    const auto in = r.number(*j, path, "n_insured", true, nonnegative, ">= 0");
    const auto un = r.number(*j, path, "n_uninsured", true, nonnegative, ">= 0");
    if (!in || !un) {
        return std::nullopt;
    }
    return InsuranceCounts{*in, *un};
}

std::optional<IncomeModel> read_income(Reader &r, const json &obj, const std::string &parent,
                                       bool required) {
    const json *j = r.object(obj, parent, "population_model", required);
    if (j == nullptr) {
        return std::nullopt;
    }
    const auto path = join(parent, "population_model");
    const auto lambda = r.number(*j, path, "lambda_med", true, positive, "> 0");
    const auto mu = r.number(*j, path, "mu_inc", true);
    const auto sigma = r.number(*j, path, "sigma_inc", true, positive, "> 0");
    const auto ee = r.number(*j, path, "essential_expense", true, nonnegative, ">= 0");
    const auto kgov = r.number(*j, path, "k_gov", true, unit_interval, "in [0, 1]");
    const double quantum = r.number_or(*j, path, "money_quantum", 1.0, positive, "> 0");
    if (!lambda || !mu || !sigma || !ee || !kgov) {
        return std::nullopt;
    }
    return IncomeModel{*lambda, *mu, *sigma, *ee, *kgov, quantum};
}

std::optional<UrbanRuralSplit> read_split(Reader &r, const json &obj, const std::string &parent,
                                          bool required) {
    const json *j = r.object(obj, parent, "urban_rural", required);
    if (j == nullptr) {
        return std::nullopt;
    }
    const auto path = join(parent, "urban_rural");
    const auto rural = r.number(*j, path, "rural_beds", true, nonnegative, ">= 0");
    const auto urban = r.number(*j, path, "urban_beds", true, positive, "> 0");
    if (!rural || !urban) {
        return std::nullopt;
    }
    return UrbanRuralSplit{*rural, *urban};
}

void check_coverage(Reader &r, const std::string &path, double population,
                    const InsuranceCounts &ins) {
    if (ins.n_insured + ins.n_uninsured != population) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "n_insured + n_uninsured (" << ins.n_insured + ins.n_uninsured
            << ") must equal population (" << population << ")";
        r.fail(path, msg.str());
    }
}

CountryProfile read_profile(const json &doc, const LoadOptions &options) {
    Reader r;
    CountryProfile p;
    if (!doc.is_object()) {
        throw ValidationError("", "profile document must be an object");
    }

    if (const json *u = r.object(doc, "", "units", true)) {
        p.units.currency = r.string(*u, "units", "currency", true).value_or("");
        p.units.per_capita_currency =
            r.string(*u, "units", "per_capita_currency", true).value_or("");
        p.units.resource_basis = r.string(*u, "units", "resource_basis", true).value_or("");
        if (!p.units.currency.empty() && p.units.currency != options.expected_currency) {
            r.fail("units.currency",
                   "expected '" + options.expected_currency + "', got '" + p.units.currency + "'");
        }
        if (!p.units.resource_basis.empty() && p.units.resource_basis != "per_1000") {
            r.fail("units.resource_basis", "expected 'per_1000', got '" + p.units.resource_basis + "'");
        }
        if (u->contains("per_capita_currency") && p.units.per_capita_currency.empty()) {
            r.fail("units.per_capita_currency", "must not be empty");
        }
    }

    p.name = r.string(doc, "", "name", true).value_or("");
    if (doc.contains("name") && doc["name"].is_string() && p.name.empty()) {
        r.fail("name", "must not be empty");
    }
    p.year = r.integer(doc, "", "year", true).value_or(0);
    const auto population = r.number(doc, "", "population", true, positive, "> 0");
    p.population = population.value_or(0.0);
    p.per_capita_gdp = r.number(doc, "", "per_capita_gdp", true, positive, "> 0").value_or(0.0);
    p.synthetic = false;
    if (const json *s = r.child(doc, "", "synthetic", false)) {
        if (!s->is_boolean()) {
            r.fail("synthetic", "expected a boolean");
        } else {
            p.synthetic = s->get<bool>();
        }
    }
    p.notes = r.string(doc, "", "notes", false).value_or("");

    if (auto b = read_bundle(r, doc, "", "essential", true)) {
        p.essential = *b;
    }
    if (auto b = read_bundle(r, doc, "", "complementary", true)) {
        p.complementary = *b;
    }
    if (auto ins = read_insurance(r, doc, "", true)) {
        p.insurance = *ins;
        if (population) {
            check_coverage(r, "insurance", *population, p.insurance);
        }
    }
    if (auto inc = read_income(r, doc, "", true)) {
        p.income = *inc;
    }
    if (auto split = read_split(r, doc, "", true)) {
        p.urban_rural = *split;
    }

    std::vector<ResearchEntry> entries;
    if (const json *rs = r.child(doc, "", "research", true)) {
        if (!rs->is_array()) {
            r.fail("research", "expected an array");
        } else {
            for (std::size_t i = 0; i < rs->size(); ++i) {
                const auto path = indexed("research", i);
                const auto &e = (*rs)[i];
                if (!e.is_object()) {
                    r.fail(path, "expected an object");
                    continue;
                }
                const auto year = r.integer(e, path, "year", true);
                const auto staff = r.number(e, path, "staff", true, nonnegative, ">= 0");
                const auto funding = r.number(e, path, "funding", true, nonnegative, ">= 0");
                if (!year || !staff || !funding) {
                    continue;
                }
                if (!entries.empty() && *year <= entries.back().year) {
                    r.fail(join(path, "year"), "years must be strictly increasing");
                    continue;
                }
                entries.push_back({*year, *staff, *funding});
            }
        }
    }

    if (const json *hs = r.child(doc, "", "history", false)) {
        if (!hs->is_array()) {
            r.fail("history", "expected an array");
        } else {
            std::set<int> seen{p.year};
            for (std::size_t i = 0; i < hs->size(); ++i) {
                const auto path = indexed("history", i);
                const auto &e = (*hs)[i];
                if (!e.is_object()) {
                    r.fail(path, "expected an object");
                    continue;
                }
                YearRecord rec;
                const auto year = r.integer(e, path, "year", true);
                if (year && !seen.insert(*year).second) {
                    r.fail(join(path, "year"), "duplicates another history year or the base year");
                }
                rec.year = year.value_or(0);
                rec.population = r.number(e, path, "population", false, positive, "> 0");
                rec.per_capita_gdp = r.number(e, path, "per_capita_gdp", false, positive, "> 0");
                rec.essential = read_bundle(r, e, path, "essential", false);
                rec.complementary = read_bundle(r, e, path, "complementary", false);
                rec.insurance = read_insurance(r, e, path, false);
                rec.income = read_income(r, e, path, false);
                rec.urban_rural = read_split(r, e, path, false);
                const double pop = rec.population.value_or(p.population);
                if (rec.insurance || rec.population) {
                    check_coverage(r, rec.insurance ? join(path, "insurance") : join(path, "population"),
                                   pop, rec.insurance.value_or(p.insurance));
                }
                p.history.push_back(std::move(rec));
            }
            std::ranges::sort(p.history, {}, &YearRecord::year);
        }
    }

    if (!r.issues.empty()) {
        throw ValidationError(std::move(r.issues));
    }
    p.research = ResearchSeries{std::move(entries)};
    return p;
}

json bundle_json(const ResourceBundle &b) {
    return json{{"doctors", b.doctors}, {"nurses", b.nurses}, {"beds", b.beds}};
}

json insurance_json(const InsuranceCounts &i) {
    return json{{"n_insured", i.n_insured}, {"n_uninsured", i.n_uninsured}};
}

json income_json(const IncomeModel &m) {
    return json{{"lambda_med", m.lambda_med},
                {"mu_inc", m.mu_inc},
                {"sigma_inc", m.sigma_inc},
                {"essential_expense", m.essential_expense},
                {"k_gov", m.k_gov},
                {"money_quantum", m.money_quantum}};
}

json split_json(const UrbanRuralSplit &s) {
    return json{{"rural_beds", s.rural_beds}, {"urban_beds", s.urban_beds}};
}

SeriesMissPolicy parse_policy(Reader &r, const json &obj) {
    const auto text = r.string(obj, "coefficients", "series_miss_policy", false);
    if (!text || *text == "strict") {
        return SeriesMissPolicy::strict;
    }
    if (*text == "nearest_prior") {
        return SeriesMissPolicy::nearest_prior;
    }
    r.fail("coefficients.series_miss_policy", "expected 'strict' or 'nearest_prior'");
    return SeriesMissPolicy::strict;
}

} // namespace

PopulationModel CountryProfile::population_model() const {
    return PopulationModel{income.lambda_med,        income.mu_inc, income.sigma_inc,
                           income.essential_expense, income.k_gov,  insurance.n_insured,
                           insurance.n_uninsured,    income.money_quantum};
}

CountryProfile profile_for_year(const CountryProfile &profile, int year) {
    if (year == profile.year) {
        return profile;
    }
    auto it = std::ranges::find(profile.history, year, &YearRecord::year);
    if (it == profile.history.end()) {
        throw LookupError("profile '" + profile.name + "' has no data for year " +
                              std::to_string(year),
                          year);
    }
    CountryProfile out = profile;
    out.year = year;
    out.population = it->population.value_or(profile.population);
    out.per_capita_gdp = it->per_capita_gdp.value_or(profile.per_capita_gdp);
    out.essential = it->essential.value_or(profile.essential);
    out.complementary = it->complementary.value_or(profile.complementary);
    out.insurance = it->insurance.value_or(profile.insurance);
    out.income = it->income.value_or(profile.income);
    out.urban_rural = it->urban_rural.value_or(profile.urban_rural);
    out.history.clear();
    return out;
}

CountryProfile parse_profile(const std::string &text, const LoadOptions &options) {
    return read_profile(parse_document(text, "<profile>"), options);
}

CountryProfile load_profile(const std::filesystem::path &path, const LoadOptions &options) {
    const auto text = read_file(path);
    try {
        return read_profile(parse_document(text, path.string()), options);
    } catch (const ValidationError &e) {
        auto issues = e.issues();
        for (auto &i : issues) {
            i.message += " (" + path.string() + ")";
        }
        throw ValidationError(std::move(issues));
    }
}

std::string dump_profile(const CountryProfile &p) {
    json doc;
    doc["units"] = json{{"currency", p.units.currency},
                        {"per_capita_currency", p.units.per_capita_currency},
                        {"resource_basis", p.units.resource_basis}};
    doc["name"] = p.name;
    doc["year"] = p.year;
    doc["population"] = p.population;
    doc["per_capita_gdp"] = p.per_capita_gdp;
    doc["synthetic"] = p.synthetic;
    doc["notes"] = p.notes;
    doc["essential"] = bundle_json(p.essential);
    doc["complementary"] = bundle_json(p.complementary);
    doc["insurance"] = insurance_json(p.insurance);
    doc["population_model"] = income_json(p.income);
    doc["urban_rural"] = split_json(p.urban_rural);
    json research = json::array();
    for (const auto &e : p.research.entries()) {
        research.push_back(json{{"year", e.year}, {"staff", e.staff}, {"funding", e.funding}});
    }
    doc["research"] = std::move(research);
    json history = json::array();
    for (const auto &h : p.history) {
        json rec{{"year", h.year}};
        if (h.population) {
            rec["population"] = *h.population;
        }
        if (h.per_capita_gdp) {
            rec["per_capita_gdp"] = *h.per_capita_gdp;
        }
        if (h.essential) {
            rec["essential"] = bundle_json(*h.essential);
        }
        if (h.complementary) {
            rec["complementary"] = bundle_json(*h.complementary);
        }
        if (h.insurance) {
            rec["insurance"] = insurance_json(*h.insurance);
        }
        if (h.income) {
            rec["population_model"] = income_json(*h.income);
        }
        if (h.urban_rural) {
            rec["urban_rural"] = split_json(*h.urban_rural);
        }
        history.push_back(std::move(rec));
    }
    doc["history"] = std::move(history);
    return doc.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        if (!out) {
            throw IoError("cannot open for writing", path.string());
        }
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed", path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot replace file", path.string());
    }
}

void save_profile(const CountryProfile &profile, const std::filesystem::path &path) {
    write_file_atomic(path, dump_profile(profile));
}

Scenario load_scenario(const std::filesystem::path &path, const LoadOptions &options) {
    const auto doc = parse_document(read_file(path), path.string());
    if (!doc.is_object()) {
        throw ValidationError("", "scenario document must be an object");
    }
    Reader r;
    Scenario s;

    const auto ref = r.string(doc, "", "profile_ref", true);
    if (ref) {
        s.profile_ref = *ref;
        s.profile_path = std::filesystem::path{*ref};
        if (s.profile_path.is_relative()) {
            s.profile_path = path.parent_path() / s.profile_path;
        }
        if (!std::filesystem::exists(s.profile_path)) {
            throw IoError("profile_ref does not resolve", s.profile_path.string());
        }
        s.profile = load_profile(s.profile_path, options);
    }

    if (const json *c = r.object(doc, "", "coefficients", true)) {
        const std::string at = "coefficients";
        auto &k = s.coefficients;
        k.k_q = r.number_or(*c, at, "k_q", 4.0, positive, "> 0");
        k.k_N = r.number(*c, at, "k_N", true, positive, "> 0").value_or(1.0);
        k.k_M = r.number(*c, at, "k_M", true, positive, "> 0").value_or(1.0);
        k.E_0 = r.number_or(*c, at, "E_0", 70.0, positive, "> 0");
        k.k_lt = r.number_or(*c, at, "k_lt", 10.0, nonnegative, ">= 0");
        const auto tau = r.integer(*c, at, "tau", false);
        if (tau && *tau < 0) {
            r.fail("coefficients.tau", "must be >= 0");
        }
        k.tau = tau.value_or(25);
        k.miss_policy = parse_policy(r, *c);
    }

    std::optional<std::array<double, 3>> k_e;
    std::optional<std::array<double, 3>> k_c;
    if (const json *sat = r.object(doc, "", "saturation", false)) {
        k_e = r.vector<3>(*sat, "saturation", "k_essential", false, positive, "> 0");
        k_c = r.vector<3>(*sat, "saturation", "k_complementary", false, positive, "> 0");
    }
    if (ref) {
        const auto base_e = k_e.value_or(s.profile.essential.as_array());
        if (k_c) {
            if (!std::ranges::all_of(base_e, positive)) {
                r.fail("saturation.k_essential",
                       "required when a baseline essential density is 0");
            } else {
                s.saturation = {base_e, *k_c};
            }
        } else {
            try {
                s.saturation = calibrate_saturation(base_e, s.profile.essential,
                                                    s.profile.complementary);
                s.saturation_calibrated = true;
            } catch (const DomainError &e) {
                r.fail("saturation.k_complementary", e.what());
            }
        }
    }

    if (const json *a = r.object(doc, "", "allocation", false)) {
        const std::string at = "allocation";
        AllocationSpec spec;
        spec.f_total = r.number(*a, at, "f_total", false, positive, "> 0");
        spec.f_med = r.number(*a, at, "f_med", true, positive, "> 0").value_or(1.0);
        spec.f_income = r.number(*a, at, "f_income", true, nonnegative, ">= 0").value_or(0.0);
        spec.p_uninsure = r.number(*a, at, "p_uninsure", false, unit_interval, "in [0, 1]");
        spec.e_indicator = r.number(*a, at, "e_indicator", false, unit_interval, "in [0, 1]");
        spec.s_salary = r.number(*a, at, "s_salary", true, positive, "> 0").value_or(1.0);
        spec.n_unit_essential = r.vector<3>(*a, at, "n_unit_essential", true, positive, "> 0")
                                    .value_or(std::array<double, 3>{1, 1, 1});
        spec.n_unit_complementary =
            r.vector<3>(*a, at, "n_unit_complementary", true, positive, "> 0")
                .value_or(std::array<double, 3>{1, 1, 1});
        if (auto base = r.vector<9>(*a, at, "baseline", false, nonnegative, ">= 0")) {
            spec.baseline.f = *base;
        }
        spec.aid_cap_fraction = r.number_or(
            *a, at, "aid_cap_fraction", 0.95, [](double v) { return v > 0.0 && v < 1.0; },
            "in (0, 1)");
        spec.step = r.number(*a, at, "step", false, positive, "> 0");
        s.allocation = spec;
    }

    if (const json *m = r.object(doc, "", "metadata", false)) {
        for (const auto &[key, value] : m->items()) {
            if (!value.is_string()) {
                r.fail("metadata." + key, "expected a string");
                continue;
            }
            s.metadata[key] = value.get<std::string>();
        }
    }

    if (!r.issues.empty()) {
        for (auto &i : r.issues) {
            i.message += " (" + path.string() + ")";
        }
        throw ValidationError(std::move(r.issues));
    }
    return s;
}

AllocationProblem make_allocation_problem(const Scenario &scenario, std::optional<double> budget) {
    if (!scenario.allocation) {
        throw ValidationError("allocation", "scenario has no allocation block");
    }
    const auto &spec = *scenario.allocation;
    AllocationProblem prob;
    const auto total = budget ? budget : spec.f_total;
    if (!total) {
        throw ValidationError("allocation.f_total", "no budget given in the scenario or on the command line");
    }
    prob.f_total = *total;
    prob.f_med = spec.f_med;
    prob.f_income = spec.f_income;
    const auto model = scenario.profile.population_model();
    prob.p_uninsure = spec.p_uninsure.value_or(1.0 - insured_proportion(model));
    prob.e_indicator = spec.e_indicator ? *spec.e_indicator
                                        : shortage_moments(model).indicator_probability;
    prob.e_indicator = std::clamp(prob.e_indicator, 0.0, 1.0);
    prob.s_salary = spec.s_salary;
    prob.n_unit_essential = spec.n_unit_essential;
    prob.n_unit_complementary = spec.n_unit_complementary;
    prob.coeffs = scenario.coefficients;
    prob.sat = scenario.saturation;
    prob.baseline = spec.baseline;
    prob.aid_cap_fraction = spec.aid_cap_fraction;
    validate(prob);
    return prob;
}

} // namespace hcs
