#!/usr/bin/env python3
"""Regenerate data/fixtures/stats_fixtures.json with scipy as the oracle for
the two-sample t-tests and Cohen's d."""
import json
import sys
from pathlib import Path

import numpy as np
from scipy import stats


def cohens_d(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = len(a), len(b)
    pooled = ((n1 - 1) * a.var(ddof=1) + (n2 - 1) * b.var(ddof=1)) / (n1 + n2 - 2)
    return float((a.mean() - b.mean()) / np.sqrt(pooled))


def case(name, a, b):
    st = stats.ttest_ind(a, b, equal_var=True)
    wt = stats.ttest_ind(a, b, equal_var=False)
    va, vb = np.var(a, ddof=1), np.var(b, ddof=1)
    na, nb = len(a), len(b)
    welch_df = (va / na + vb / nb) ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return {
        "name": name,
        "a": list(map(float, a)),
        "b": list(map(float, b)),
        "student": {"t": float(st.statistic), "df": na + nb - 2, "p": float(st.pvalue)},
        "welch": {"t": float(wt.statistic), "df": float(welch_df), "p": float(wt.pvalue)},
        "cohens_d": cohens_d(a, b),
    }


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "data/fixtures/stats_fixtures.json")
    rng = np.random.default_rng(7)
    cases = [
        # Classic textbook pair (Student 1908 sleep data, groups 1 and 2).
        case("sleep", [0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0],
             [1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4]),
        case("small_unequal", [19.1, 21.3, 18.7, 22.0], [15.2, 16.8, 14.9, 17.5, 16.1, 15.0]),
        case("twenty_each",
             np.round(rng.normal(0.07, 0.106, 20), 6).tolist(),
             np.round(rng.normal(-0.006, 0.118, 20), 6).tolist()),
        case("negative_effect",
             np.round(rng.normal(-0.116, 0.143, 20), 6).tolist(),
             np.round(rng.normal(0.010, 0.150, 20), 6).tolist()),
        case("two_each", [1.0, 2.0], [3.0, 5.0]),
    ]
    out.write_text(json.dumps({"cases": cases}, indent=2) + "\n")
    print(f"wrote {len(cases)} cases to {out}")


if __name__ == "__main__":
    main()
