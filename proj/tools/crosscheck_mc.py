#!/usr/bin/env python3
"""Independent NumPy Monte Carlo for single-barrier calls and puts under the
log-Euler Heston scheme with full truncation. Shares no code with the library;
compare its output with `bqmc-price run`."""

import argparse

import numpy as np


def price(v0, theta, sigma, rho, s0, strike, barrier, r, kappa, t, payoff, kind, steps, paths, seed):
    rng = np.random.default_rng(seed)
    dt = t / steps
    x = np.full(paths, np.log(s0))
    v = np.full(paths, v0)
    crossed = np.zeros(paths, bool)
    for _ in range(steps):
        z1 = rng.standard_normal(paths)
        z2 = rng.standard_normal(paths)
        vp = np.maximum(v, 0.0)
        x = x + (r - vp / 2) * dt + np.sqrt(vp * dt) * (rho * z1 + np.sqrt(1 - rho**2) * z2)
        v = v + kappa * (theta - v) * dt + sigma * np.sqrt(vp * dt) * z1
        s = np.exp(x)
        crossed |= s >= barrier if kind.startswith("up") else s <= barrier
    s = np.exp(x)
    pay = np.maximum(s - strike, 0) if payoff == "call" else np.maximum(strike - s, 0)
    pay = pay * (~crossed if kind.endswith("out") else crossed) * np.exp(-r * t)
    return pay.mean(), pay.std(ddof=1) / np.sqrt(paths)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--v0", type=float, default=0.2)
    p.add_argument("--theta", type=float, default=0.2)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--rho", type=float, default=-0.5)
    p.add_argument("--s0", type=float, default=110)
    p.add_argument("--k", type=float, default=100)
    p.add_argument("--b", type=float, default=150)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--payoff", choices=["call", "put"], default="call")
    p.add_argument("--kind", choices=["up_out", "up_in", "down_out", "down_in"], default="up_out")
    p.add_argument("--m", type=int, default=250)
    p.add_argument("--paths", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=1)
    a = p.parse_args()
    mean, se = price(a.v0, a.theta, a.sigma, a.rho, a.s0, a.k, a.b, a.r, a.kappa, a.t, a.payoff, a.kind, a.m,
                     a.paths, a.seed)
    print(f"price {mean:.6f}  std_err {se:.6f}  paths {a.paths}")


if __name__ == "__main__":
    main()
