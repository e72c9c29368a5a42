#!/usr/bin/env python3
"""Conditional-random-field image-labeling experiment: train on noisy
observations of a binary X image, tracking the test-label error per update."""

import argparse

import numpy as np

from eestim.experiments import CrfExperimentConfig, run_crf_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/crf")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--eval-every", type=int, default=1)
    args = ap.parse_args()

    cfg = CrfExperimentConfig(out_dir=args.out, eval_every=args.eval_every)
    if args.seed is not None:
        cfg.seed = args.seed
    res = run_crf_experiment(cfg)
    print(f"theta_cd = {np.round(res.theta_cd, 4)}")
    print(f"theta_ee = {np.round(res.theta_ee, 4)}")
    print(
        f"error: start = {res.err_start:.4f}  after CD = {res.err_cd_final:.4f}  "
        f"after EE = {res.err_ee_final:.4f}"
    )
    print(f"outputs in {args.out}")


if __name__ == "__main__":
    main()
