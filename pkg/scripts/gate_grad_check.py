#!/usr/bin/env python3
"""Verify analytic gate gradients against central finite differences.

Draws random (signal, parameter) instances, compares every partial
derivative of the gate (mean offsets, log-scales, input) with a central
difference at step h, and reports the worst error per gradient block.

Example:
    python3 scripts/gate_grad_check.py --instances 200 --step 1e-4
"""

import argparse

import numpy as np

from jdtok.daam import DaamParams, daam_gate, daam_gate_grad


def finite_difference(x, params, h):
    k, t = params.num_components, x.size
    d_off = np.empty((k, t))
    d_log = np.empty((k, t))
    d_in = np.empty((t, t))
    for i in range(k):
        up, dn = params.mean_offsets.copy(), params.mean_offsets.copy()
        up[i] += h
        dn[i] -= h
        d_off[i] = (
            daam_gate(x, DaamParams(up, params.log_scales))
            - daam_gate(x, DaamParams(dn, params.log_scales))
        ) / (2 * h)
        up, dn = params.log_scales.copy(), params.log_scales.copy()
        up[i] += h
        dn[i] -= h
        d_log[i] = (
            daam_gate(x, DaamParams(params.mean_offsets, up))
            - daam_gate(x, DaamParams(params.mean_offsets, dn))
        ) / (2 * h)
    for s in range(t):
        xp, xm = x.copy(), x.copy()
        xp[s] += h
        xm[s] -= h
        d_in[:, s] = (daam_gate(xp, params) - daam_gate(xm, params)) / (2 * h)
    return d_off, d_log, d_in


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=100)
    parser.add_argument("--step", type=float, default=1e-4)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    worst = {"offsets": 0.0, "log_scales": 0.0, "input": 0.0}
    for trial in range(args.instances):
        k = [1, 2, 4][trial % 3]
        t = int(rng.integers(4, 65))
        params = DaamParams(rng.uniform(-1, 1, k), rng.uniform(-2, 1, k))
        x = rng.standard_normal(t) * float(rng.uniform(0.5, 3.0))
        analytic = daam_gate_grad(x, params)
        oracle = finite_difference(x, params, args.step)
        for name, a, o in zip(worst, analytic, oracle):
            err = float(np.max(np.abs(a - o) / np.maximum(np.abs(o), 1e-4)))
            worst[name] = max(worst[name], err)

    for name, err in worst.items():
        status = "ok" if err < 1e-4 else "FAIL"
        print(f"{name:<12} worst rel err {err:.3e}  [{status}]")


if __name__ == "__main__":
    main()
