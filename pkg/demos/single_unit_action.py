"""Follow one unit and check the variational story on its recorded path.

A single weight fed the constant input 1.0 is the whole network, so the
pre-activation z is the weight itself and the run integrates an autonomous
scalar ODE. Along the recorded path the demo checks the two identities:
the Euler-Lagrange residual shrinks at second order under step halving,
and at the tensor-net zero crossing the integral of sigmoid(z) dz matches
the action entropy up to a one-step leftover.
"""

import math
from pathlib import Path

import numpy as np

import ska
from ska.charts import Marker, Series, line_chart
from ska.dynamics import NetworkConfig

OUT = Path(__file__).parent / "out"
W0 = -0.5
TOTAL_TIME = 6.0


def scalar_run(dt):
    config = NetworkConfig(layer_sizes=(1, 1), dt=dt,
                           steps=int(round(TOTAL_TIME / dt)), seed=0)
    net = ska.init_network(config)
    net.layers[0].W = np.array([[W0]])
    return ska.run(net, ska.constant_dataset(1, 1, 1.0),
                   record_units=[(0, 0, 0)])


def main():
    OUT.mkdir(exist_ok=True)
    dt = 0.05
    trace = scalar_run(dt)
    (traj,) = ska.extract_unit_trajectories(trace, [(0, 0, 0)])
    print(f"z starts at {traj.z[0]:g} and ends at {traj.z[-1]:.4f} "
          f"after {TOTAL_TIME:g} time units")

    r1 = np.abs(ska.el_residual(traj)).max()
    half = scalar_run(dt / 2)
    (traj_half,) = ska.extract_unit_trajectories(half, [(0, 0, 0)])
    r2 = np.abs(ska.el_residual(traj_half)).max()
    print(f"EL residual: {r1:.3e} at dt={dt}, {r2:.3e} at dt={dt / 2}, "
          f"order {math.log2(r1 / r2):.2f}")

    crossings = ska.find_zero_crossings(trace, 0)
    t_star = crossings[0] * dt
    residual = ska.net_action_identity(traj, t_star)
    zdot_max = np.abs(np.diff(traj.z)).max() / dt
    print(f"net crossing at t = {t_star:.3f} (z = {np.interp(t_star, traj.t, traj.z):.3f})")
    print(f"net-action residual {residual:.3e}, bound 10*dt*max|zdot| = "
          f"{10 * dt * zdot_max:.3e}")

    path_series = Series("z(t)", traj.t, traj.z, "#1f77b4")
    net_series = Series("net_cum", trace.times, trace.net_cum[:, 0], "#d62728")
    svg = line_chart(
        [path_series, net_series],
        title="Single unit: knowledge path and cumulative net",
        x_label="time", y_label="value",
        markers=[Marker(t_star, 0.0, label="crossing")],
    )
    out_path = OUT / "single_unit_action.svg"
    out_path.write_text(svg)
    print(f"chart: {out_path}")


if __name__ == "__main__":
    main()
