"""Print condition values next to empirical constants for the case fixtures.

    python scripts/sandwich_table.py [--count 3] [--seed 0] [--candidates 32]
"""
from __future__ import annotations

import argparse
import time

from copson import conditions, fixtures, oracle
from copson.config import OptimizerBudget


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--candidates", type=int, default=32)
    ap.add_argument("--local-steps", type=int, default=32)
    args = ap.parse_args(argv)
    budget = OptimizerBudget(candidates=args.candidates, local_steps=args.local_steps)
    print(f"{'case':4} {'m':>4} {'p':>4} {'q':>4} {'C_estimate':>11} {'C_emp':>11} {'ratio':>7} {'s':>5}")
    for case in conditions.CASES:
        for prob in fixtures.case_fixtures(case, args.count, args.seed):
            t0 = time.perf_counter()
            rep = conditions.embedding_constant(*prob.args)
            emp = oracle.empirical_embedding_constant(*prob.args, budget=budget).C_emp
            print(f"{case:4} {prob.m:4g} {prob.p:4g} {prob.q:4g} {rep.C_estimate:11.5g} "
                  f"{emp:11.5g} {rep.C_estimate / emp:7.3f} {time.perf_counter() - t0:5.1f}")


if __name__ == "__main__":
    main()
