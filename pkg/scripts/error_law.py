"""Empirical estimator variance against 1/(g^2 N) for a number state."""

import argparse

import numpy as np

from qndsim.collision import kraus_coefficients
from qndsim.device import CouplingConstants
from qndsim.estimation import empirical_measurement_error
from qndsim.fock import make_number_state


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n0", type=int, default=10)
    p.add_argument("--g", type=float, nargs="+", default=[0.005, 0.01, 0.02])
    p.add_argument("--N", type=int, nargs="+", default=[100, 1000, 10000])
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    state = make_number_state(args.n0, args.n0)
    print(f"{'g':>8} {'N':>7} {'var(n_hat)':>12} {'1/(g^2 N)':>12} {'ratio':>7} {'mean':>8}")
    for g in args.g:
        kraus = kraus_coefficients(CouplingConstants.symmetric(g), args.n0)
        variances = []
        for N in args.N:
            r = empirical_measurement_error(state, kraus, N, args.trials, args.seed)
            variances.append(r.empirical_error_variance)
            print(f"{g:8.4g} {N:7d} {r.empirical_error_variance:12.5g} {r.predicted:12.5g} {r.ratio:7.3f} {r.mean_estimate:8.3f}")
        if len(args.N) > 1:
            slope = np.polyfit(np.log(args.N), np.log(variances), 1)[0]
            print(f"  log-log slope vs N: {slope:.3f}")


if __name__ == "__main__":
    main()
