#!/usr/bin/env python3
"""Generates data/synthetic_prices.csv: 20 assets, monthly closes from a
two-factor return model with heterogeneous drifts and volatilities."""

import argparse
import pathlib

import numpy as np


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic_prices.csv"))
    ap.add_argument("--assets", type=int, default=20)
    ap.add_argument("--months", type=int, default=85)
    ap.add_argument("--seed", type=int, default=20240517)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n, t = args.assets, args.months
    drift = rng.uniform(-0.004, 0.022, n)
    beta = rng.uniform(0.3, 1.4, (n, 2)) * np.array([1.0, 0.5])
    idio = rng.uniform(0.015, 0.075, n)
    factors = rng.normal(0.0, [0.035, 0.025], (t, 2))
    returns = drift + factors @ beta.T + rng.normal(0.0, 1.0, (t, n)) * idio

    prices = np.empty((t + 1, n))
    prices[0] = rng.uniform(8.0, 120.0, n)
    for i in range(t):
        prices[i + 1] = prices[i] * (1.0 + returns[i])
    if (prices <= 0).any():
        raise SystemExit("non-positive price generated; change the seed")

    names = [f"F{i + 1:02d}" for i in range(n)]
    with open(args.out, "w", encoding="ascii") as f:
        f.write(",".join(names) + "\n")
        for row in prices:
            f.write(",".join(f"{p:.4f}" for p in row) + "\n")


if __name__ == "__main__":
    main()
