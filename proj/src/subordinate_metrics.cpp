#include "hcs/subordinate_metrics.hpp"

#include "hcs/errors.hpp"

#include <cmath>
#include <string>

namespace hcs {

MatchingDegree matching_degree(const EconomicContext &ctx) {
    if (!std::isfinite(ctx.per_capita_gdp) || ctx.per_capita_gdp <= 0.0 ||
        !std::isfinite(ctx.life_index) || ctx.life_index <= 0.0) {
        throw DomainError("matching_degree: per_capita_gdp and life_index must be finite and > 0");
    }
    const double denom = std::log(ctx.per_capita_gdp) - std::log(ctx.life_index);
    if (denom == 0.0) {
        throw SingularityError("matching_degree: ln(per_capita_gdp) equals ln(life_index)");
    }
    return {10.0 / denom, denom < 0.0};
}

double fairness_degree(const UrbanRuralSplit &split) {
    if (!std::isfinite(split.urban_beds) || split.urban_beds <= 0.0) {
        throw DomainError("fairness_degree: urban density must be > 0");
    }
    if (!std::isfinite(split.rural_beds) || split.rural_beds < 0.0) {
        throw DomainError("fairness_degree: rural density must be >= 0");
    }
    return split.rural_beds / split.urban_beds;
}

double luxury_index(const LuxuryComponents &c) {
    auto check = [](double v, double hi, bool closed, const char *name) {
        if (!(v >= 0.0 && (closed ? v <= hi : v < hi))) {
            throw DomainError(std::string{"luxury_index: "} + name + " out of range");
        }
    };
    check(c.r_essential, 1.0, false, "r_essential");
    check(c.r_complementary, 1.0, false, "r_complementary");
    check(c.p_ei, 1.0, true, "p_ei");
    check(c.p_hc, 1.0, false, "p_hc");
    const double unnecessary = c.r_complementary + c.p_hc;
    const double necessary = c.r_essential + c.p_ei;
    if (unnecessary + necessary <= 0.0) {
        throw DomainError("luxury_index: both degrees are zero");
    }
    return unnecessary / (necessary + unnecessary);
}

} // namespace hcs
