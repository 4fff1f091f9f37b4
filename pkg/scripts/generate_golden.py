"""Regenerate tests/golden/bounds_golden.json with independent arithmetic.

Every formula is re-implemented here with mpmath at 50 significant digits —
this script deliberately does not import the package, so the table is an
independent oracle for the float64 evaluators.  Run with --write to replace
the checked-in table; without it the script prints the rows and exits.
"""

from __future__ import annotations

import argparse
import json
import pathlib

import mpmath as mp

mp.mp.dps = 50

GOLDEN_PATH = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden" / "bounds_golden.json"


def min_sparsity(q, r):
    # linear scan (the package binary-searches; disagreement would be a bug)
    q, r = mp.mpf(q), mp.mpf(r)
    hi = max(1, int(mp.floor(q / mp.e)))
    for s in range(1, hi + 1):
        if s * mp.log(q / s) >= r:
            return s
    raise AssertionError("infeasible row in golden grid")


def incoherent_rows(eps, N):
    eps, N = mp.mpf(eps), mp.mpf(N)
    return mp.log(N) / (eps**2 * mp.log(1 / eps))


def jl_sparsity(eps, n, m):
    eps, n, m = mp.mpf(eps), mp.mpf(n), mp.mpf(m)
    return (1 / eps) * mp.log(n) / max(mp.log(m / mp.log(n)), mp.mpf(1))


def rip_sparsity(k, n, m):
    k, n, m = mp.mpf(k), mp.mpf(n), mp.mpf(m)
    kl = k * mp.log(n / k)
    return min(kl / max(mp.log(m / kl), mp.mpf(1)), m)


def rip_rows(delta, k, n):
    delta, k, n = mp.mpf(delta), mp.mpf(k), mp.mpf(n)
    return min(k * mp.log(n / k) / delta + k / delta**2, n) / mp.log(1 / delta)


def code_size(eps, k, n):
    eps, k, n = mp.mpf(eps), mp.mpf(k), mp.mpf(n)
    return (eps**2 * n, eps * k * mp.log(eps * n / (2 * k)))


def build_rows() -> list[dict]:
    rows = []

    for q in (10, 100, 1000, 10**4, 10**5):
        for r in (1.0, 3.0, q / 10, q / 4):
            rows.append(
                {"formula": "min_sparsity", "params": {"q": q, "r": r}, "value": min_sparsity(q, r)}
            )

    for eps in (0.05, 0.1, 0.2, 0.3, 0.45):
        for N in (1e3, 1e6, 1e9, 1e12):
            rows.append(
                {
                    "formula": "incoherent_rows",
                    "params": {"eps": eps, "N": N},
                    "value": float(incoherent_rows(eps, N)),
                }
            )

    for eps in (0.05, 0.1, 0.2, 0.4):
        for n, m in ((1e4, 100.0), (1e4, 1e4), (1e6, 20.0), (1e6, 1e5), (1e9, 1e6)):
            rows.append(
                {
                    "formula": "jl_sparsity",
                    "params": {"eps": eps, "n": n, "m": m},
                    "value": float(jl_sparsity(eps, n, m)),
                }
            )

    for k in (2, 4, 8, 16, 32):
        for n in (2.0**40, 2.0**50):
            kl = k * mp.log(mp.mpf(n) / k)
            cap = mp.mpf(n) / (64 * mp.log(n) ** 3)
            for m in (float(mp.e * kl), float(cap / 2)):
                rows.append(
                    {
                        "formula": "rip_sparsity",
                        "params": {"k": k, "n": n, "m": m},
                        "value": float(rip_sparsity(k, n, m)),
                    }
                )

    for delta in (0.05, 0.1, 0.25, 0.5):
        for k, n in ((1, 1e4), (2, 1e4), (8, 1e6), (32, 1e8), (128, 1e10)):
            rows.append(
                {
                    "formula": "rip_rows",
                    "params": {"delta": delta, "k": k, "n": n},
                    "value": float(rip_rows(delta, k, n)),
                }
            )

    code_grid = [
        (0.1, 1, 1e3), (0.1, 4, 1e3), (0.1, 50, 1e3), (0.1, 16, 1e6), (0.1, 1024, 1e6),
        (0.1, 8, 1e9), (0.25, 1, 1e3), (0.25, 16, 1e3), (0.25, 125, 1e3), (0.25, 64, 1e6),
        (0.25, 4096, 1e6), (0.25, 2, 1e9), (0.5, 1, 1e3), (0.5, 32, 1e3), (0.5, 250, 1e3),
        (0.5, 125, 1e6), (0.5, 65536, 1e6), (0.5, 1, 16.0), (0.5, 4, 16.0), (0.5, 2, 1e9),
    ]
    for eps, k, n in code_grid:
        e1, e2 = code_size(eps, k, n)
        rows.append(
            {
                "formula": "code_size",
                "params": {"eps": eps, "k": k, "n": n},
                "value": [float(e1), float(e2)],
            }
        )

    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--write", action="store_true", help="replace the checked-in table")
    args = parser.parse_args()
    rows = build_rows()
    text = json.dumps(rows, indent=1, sort_keys=True) + "\n"
    if args.write:
        GOLDEN_PATH.parent.mkdir(parents=True, exist_ok=True)
        GOLDEN_PATH.write_text(text)
        print(f"wrote {len(rows)} rows to {GOLDEN_PATH}")
    else:
        print(text, end="")
        print(f"-- {len(rows)} rows (dry run; use --write to save)")


if __name__ == "__main__":
    main()
