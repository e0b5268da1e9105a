"""
Words with a net rotation protect the spin component along their axis
======================================================================

XY8 x 3 with its first pi pulse shortened to pi/2 has a net pi/2 rotation
about -X. Like a spin lock, it preserves the x component best.
"""

import numpy as np

from doess import sequences, simulator

params = simulator.SimulatorParams(n_spins=3, K=32, cycle_grid=(1, 2, 4, 8, 16, 32, 64))

for name, codes in (("net_x_demo", sequences.NET_X_DEMO), ("xy8x3", sequences.baseline("xy8").codes * 3)):
    rep = simulator.anisotropy_report(codes, params)
    rates = {a: round(rep["fit"].rate[a], 4) for a in "xyz"}
    print(f"{name:10s} net axis {np.round(rep['net_axis'], 3)} angle {rep['net_angle']:.3f}  "
          f"rates {rates}  spin-lock like: {rep['spin_lock_like']}")

# continuous driving along +X for comparison
lock = simulator.fit_exponential(simulator.spin_lock_curve("+X", params))
print("spin lock +X rates", {a: round(lock.rate[a], 4) for a in lock.axes})
