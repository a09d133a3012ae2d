"""Reference benchmarks: Abelian solid-angle phase and the spin-1/2 monopole."""

import math

import numpy as np

from lambda_holonomy.holonomy import CircleLoop, discretize, phase_magnitude_error, wilson_loop
from lambda_holonomy.lambda_gauge import AbelianTestConnection, sphere_flux

print("theta0,steps,phase,expected,error")
for theta0 in (math.pi / 6, math.pi / 4, math.pi / 3):
    for n in (1_000, 10_000, 100_000):
        u = wilson_loop(discretize(CircleLoop(theta0), n), AbelianTestConnection()).matrix
        phase = float(np.angle(u[0, 0]))
        expected = math.pi * (1 - math.cos(2 * theta0))
        print(f"{theta0:.12g},{n},{phase:.12g},{expected:.12g},{phase_magnitude_error(phase, expected):.3e}")

for branch in ("+", "-"):
    flux = sphere_flux(branch)
    print(f"# branch {branch}: sphere flux {flux:.6f}, Chern number {flux / (2 * math.pi):+.5f}")
