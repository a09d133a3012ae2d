"""Composed-path population difference versus the phase offset of loop 2.

Holonomy prediction only (cheap); add ``--tdse`` to integrate the
Schroedinger equation at every point as well.  Output is CSV on stdout.
"""

import argparse
import math
from dataclasses import replace

import numpy as np

from lambda_holonomy.experiments import ExperimentConfig, composed_path_pd


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=17)
    parser.add_argument("--alpha", type=float, default=0.8)
    parser.add_argument("--beta", type=float, default=0.5)
    parser.add_argument("--connection", default="frame")
    parser.add_argument("--tdse", action="store_true")
    args = parser.parse_args()

    base = ExperimentConfig(connection=args.connection)
    loop1 = replace(base.loop1, alpha=args.alpha, beta=args.beta)
    print("phase_offset,pd_holonomy,commutator_norm" + (",pd_tdse" if args.tdse else ""))
    for offset in np.linspace(0, 2 * math.pi, args.points):
        config = replace(base, loop1=loop1, loop2=replace(loop1, phase_offset=float(offset)))
        hol = composed_path_pd(config, "holonomy")
        line = f"{offset:.12g},{hol.pd:.12g},{hol.commutator_norm:.12g}"
        if args.tdse:
            line += f",{composed_path_pd(config, 'tdse').pd:.12g}"
        print(line)


if __name__ == "__main__":
    main()
