"""Particle density profile against the deterministic limit equation.

Starts the chain from a product measure with a cosine density profile and
compares block-averaged empirical densities at two times with the solution
of du/dt = Lap(u) + F(u) from the spectral solver.
"""

import math

import numpy as np

from rdex import fields, pde
from rdex.simulate import SimConfig, run
from rdex.theory import ModelParams, rho_star

n, M = 256, 16
p = ModelParams(1.0, 1.0, 0.2, 1, n)
rs = rho_star(p)
x_sites = np.arange(n) / n
profile = rs + 0.2 * np.cos(2 * math.pi * x_sites)

times = [0.02, 0.1]
x_grid = np.arange(M) / M
traj = pde.solve_hydro(rs + 0.2 * np.cos(2 * math.pi * x_grid), max(times), p, M,
                       dt=5e-4, record_times=times)

cfg = SimConfig(
    params=p, seed=3, total_time=max(times) + 1e-9, sample_interval=times[0],
    burn_in=0.0, replicas=10, record_configs=True, init=profile, threads=2,
)
streams = run(cfg)
ell = n // M
centers = (np.arange(M) * ell + (ell - 1)) / n

for t in times:
    j = int(round(t / times[0])) - 1
    block = np.zeros(M)
    for s in streams:
        block += fields.block_average_field(s.configs[j].astype(float), ell, 0.0, n, 1)[::ell]
    block /= len(streams)
    ref = pde.evaluate_profile(traj.profiles[times.index(t)], centers[:, None], M, 1)
    err = math.sqrt(float(np.mean((block - ref) ** 2)))
    print(f"t = {t}: L2(particles - equation) = {err:.4f}")
    line = "  grid: " + " ".join(f"{v:.3f}" for v in ref[:8])
    print(line + " ...")
    line = "  part: " + " ".join(f"{v:.3f}" for v in block[:8])
    print(line + " ...")
print("\nthe cosine relaxes toward rho* at rate 4 pi^2 - F'(rho*); by t ~ 0.5"
      "\nonly stationary fluctuations of order 1/sqrt(block) remain.")
