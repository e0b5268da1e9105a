"""
Coherence of baseline sequences in a disordered dipolar cluster
================================================================

Monte Carlo over small spin clusters with random on-site fields, dipolar
couplings and pulse-amplitude errors. A reduced simulator keeps this quick.
"""

import numpy as np

from doess import sequences, simulator

params = simulator.SimulatorParams(n_spins=3, K=32, cycle_grid=(1, 2, 4, 8, 16, 32, 64))

# coherence curves, single-exponential fits and the two scores
for name in sequences.BASELINE_NAMES:
    seq = sequences.baseline(name)
    score, fit, curve = simulator.full_score(seq, params)
    simple = simulator.simplified_score(seq, params)
    print(f"{name:12s} kappa {fit.kappa:8.4f} /us   coherence score {score:.3f}   simplified {simple:.3f}")

# one curve in detail: survival per initial axis after M cycles
curve = simulator.coherence_curve(sequences.baseline("xy8"), params)
for m, t, x, y, z in zip(curve.cycles, curve.times, *(curve.values[a] for a in "xyz")):
    print(f"M={m:3d}  t={t:6.2f} us  x={x:.3f}  y={y:.3f}  z={z:.3f}")

# without noise every word is perfect in the net-rotation frame
quiet = simulator.SimulatorParams(n_spins=2, K=4, disorder_std=0.0, coupling_scale=0.0, pulse_error_std=0.0)
print("noise free:", simulator.simplified_score(sequences.random_codes(np.random.default_rng(1)), quiet))
