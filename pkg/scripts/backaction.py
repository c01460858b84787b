"""Phase-variance growth of a coherent state against N g^2 / 4, and the product with 1/(g^2 N)."""

import argparse

from qndsim.device import CouplingConstants
from qndsim.ensemble import density_after_collisions_closed
from qndsim.fock import make_coherent_state
from qndsim.phase import backaction_noise, predicted_backaction


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--xi", type=float, default=10.0)
    p.add_argument("--g", type=float, default=0.01)
    p.add_argument("--N", type=int, nargs="+", default=[50, 100, 200, 400])
    args = p.parse_args()

    state = make_coherent_state(args.xi)
    coupling = CouplingConstants.symmetric(args.g)
    print(f"{'N':>6} {'backaction':>12} {'N g^2/4':>12} {'ratio':>8} {'x 1/(g^2N)':>11}")
    for N in args.N:
        ba = backaction_noise(state, density_after_collisions_closed(state, coupling, N))
        pred = predicted_backaction(args.g, N)
        print(f"{N:6d} {ba:12.5g} {pred:12.5g} {ba / pred:8.4f} {ba / (args.g**2 * N):11.4f}")


if __name__ == "__main__":
    main()
