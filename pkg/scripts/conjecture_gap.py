#!/usr/bin/env python
"""Compare the conjectured capacity formula with the ancilla optimizer along mu_xy."""
import argparse

import numpy as np

from entcap.capacity import OptimizerConfig, optimize_rate
from entcap.conjecture import conjecture_argmax, k_mu_xy
from entcap.qmath import schmidt


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--mu", nargs="+", type=float, default=list(np.linspace(0, 1, 11)))
    p.add_argument("--ancilla", nargs=2, type=int, default=[2, 2])
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    print(f"{'mu_xy':>6} {'conjecture':>11} {'optimizer':>11} {'gap':>9}  optimizer Schmidt spectrum")
    for mu in args.mu:
        conj, _ = conjecture_argmax(mu, seed=args.seed)
        res = optimize_rate(k_mu_xy(mu, mu), tuple(args.ancilla), cfg)
        spec = np.round(schmidt(res.best_state).lambdas, 5)
        print(f"{mu:6.3f} {conj:11.6f} {res.best_rate:11.6f} {res.best_rate - conj:+9.6f}  {spec}")


if __name__ == "__main__":
    main()
