#!/usr/bin/env python3
"""Regenerates the SYNTHETIC demonstration profiles in this directory.

The numbers are invented. They are loosely shaped so that the three profiles
contrast a universal-coverage system, a high-spending partial-coverage system
and a low-resource system; they are not statistics of any real country.
"""
import json
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent
UNITS = {"currency": "USD_millions", "per_capita_currency": "USD", "resource_basis": "per_1000"}
NOTE = "SYNTHETIC demonstration data; not real statistics."


def research(first, last, staff0, staff1, fund0, fund1):
    out = []
    span = last - first
    for y in range(first, last + 1):
        t = (y - first) / span
        staff = staff0 * math.pow(staff1 / staff0, t)
        fund = fund0 * math.pow(fund1 / fund0, t)
        out.append({"year": y, "staff": round(staff), "funding": round(fund, 1)})
    return out


def profile(name, year, population, gdp, essential, complementary, insured, model, series,
            urban_rural, history=()):
    n_in = round(population * insured)
    return {
        "units": UNITS,
        "name": name,
        "year": year,
        "population": population,
        "per_capita_gdp": gdp,
        "synthetic": True,
        "notes": NOTE,
        "essential": dict(zip(("doctors", "nurses", "beds"), essential)),
        "complementary": dict(zip(("doctors", "nurses", "beds"), complementary)),
        "insurance": {"n_insured": n_in, "n_uninsured": population - n_in},
        "population_model": model,
        "research": series,
        "urban_rural": dict(zip(("rural_beds", "urban_beds"), urban_rural)),
        "history": list(history),
    }


def us_history():
    rows = []
    population0 = 250_000_000
    for y in range(1990, 2008):
        t = (y - 1990) / 18.0
        population = int(round(population0 + t * 54_000_000, -3))
        insured = 0.83 + 0.02 * t + (0.01 if 1993 <= y <= 1997 else 0.0)
        n_in = round(population * insured)
        rows.append({
            "year": y,
            "population": population,
            "per_capita_gdp": round(24000 + t * 22000, 0),
            "essential": {"doctors": round(2.1 + 0.3 * t, 3), "nurses": round(8.6 + 1.2 * t, 3),
                          "beds": round(3.7 - 0.7 * t, 3)},
            "complementary": {"doctors": round(0.8 + 0.2 * t, 3), "nurses": round(2.4 + 0.6 * t, 3),
                              "beds": round(1.4 - 0.2 * t, 3)},
            "insurance": {"n_insured": n_in, "n_uninsured": population - n_in},
        })
    return rows


PROFILES = {
    "us_like.json": profile(
        "US-like (synthetic)", 2008, 304_000_000, 46000.0,
        (2.4, 9.8, 3.0), (1.0, 3.0, 1.2), 0.85,
        {"lambda_med": 2500.0, "mu_inc": 30000.0, "sigma_inc": 20000.0,
         "essential_expense": 24000.0, "k_gov": 0.3, "money_quantum": 10.0},
        research(1960, 2008, 40000, 150000, 6000.0, 40000.0), (2.6, 3.4), us_history()),
    "sweden_like.json": profile(
        "Sweden-like (synthetic)", 2008, 9_200_000, 52000.0,
        (3.6, 11.0, 3.2), (1.1, 3.4, 1.2), 1.0,
        {"lambda_med": 3000.0, "mu_inc": 28000.0, "sigma_inc": 12000.0,
         "essential_expense": 15000.0, "k_gov": 0.8, "money_quantum": 10.0},
        research(1960, 2008, 50000, 120000, 8000.0, 30000.0), (3.1, 3.3)),
    "china_like.json": profile(
        "China-like (synthetic)", 2008, 1_330_000_000, 3400.0,
        (1.4, 1.1, 2.2), (0.3, 0.3, 0.8), 0.55,
        {"lambda_med": 300.0, "mu_inc": 2500.0, "sigma_inc": 1500.0,
         "essential_expense": 1800.0, "k_gov": 0.2, "money_quantum": 1.0},
        research(1960, 2008, 3000, 40000, 150.0, 3000.0), (1.1, 4.2)),
}


def main():
    for name, doc in PROFILES.items():
        (HERE / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
