#pragma once

namespace hcs {

struct EconomicContext {
    double per_capita_gdp{};
    double life_index{};
};

/// Comparable resource densities for rural and urban residents (hospital beds by default).
struct UrbanRuralSplit {
    double rural_beds{};
    double urban_beds{};

    bool operator==(const UrbanRuralSplit &) const = default;
};

struct LuxuryComponents {
    double r_essential{};
    double r_complementary{};
    double p_ei{};
    double p_hc{};
};

struct MatchingDegree {
    double value{};
    /// Set when L_index >= gdp numerically, i.e. the value is negative.
    bool out_of_regime{false};
};

/// 10 / (ln gdp - ln L_index). Throws SingularityError when the logs coincide.
MatchingDegree matching_degree(const EconomicContext &ctx);

/// rural / urban density ratio; 1 is parity.
double fairness_degree(const UrbanRuralSplit &split);

/// D_un / (D_ne + D_un) with D_un = r_complementary + p_hc and D_ne = r_essential + p_ei.
double luxury_index(const LuxuryComponents &c);

} // namespace hcs
