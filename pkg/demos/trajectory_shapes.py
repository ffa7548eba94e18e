"""Reproduce the qualitative trajectory shapes on a five-layer network.

A [784, 256, 128, 64, 10] network runs forward-only for 50 steps at
eta = 0.01 on 4096 synthetic digit glyphs. The things to look for, layer
by layer: knowledge norms that only grow once learning settles, a hidden
layer whose cumulative net crosses zero mid-run, an output layer that
stays net-negative, and flow norms peaking strictly inside the window.
"""

from pathlib import Path

import numpy as np

import ska
from ska.charts import COLORS, Marker, Series, line_chart
from ska.dynamics import NetworkConfig

OUT = Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    print("building 4096 glyph images")
    dataset = ska.glyph_dataset(4096, seed=7)
    config = NetworkConfig(layer_sizes=(784, 256, 128, 64, 10), dt=0.01,
                           steps=50, seed=10, init_std_scale=0.15)
    print(f"integrating {config.steps} steps at eta = {config.dt}")
    trace = ska.run(ska.init_network(config), dataset)

    print(f"\n{'layer':<7}{'entropy min':>12}{'flow peak':>11}{'crossings':>22}")
    for l in range(trace.n_layers):
        crossings = ska.find_zero_crossings(trace, l)
        shown = ", ".join(f"{c:.2f}" for c in crossings) or "none"
        print(f"{l + 1:<7}{ska.find_entropy_minimum(trace, l):>12}"
              f"{ska.find_flow_peak(trace, l):>11}{shown:>22}")

    out_layer = trace.n_layers - 1
    frac = float(np.mean(trace.net_cum[:, out_layer] <= 0.0))
    print(f"\noutput layer net_cum <= 0 on {frac:.0%} of steps")

    names = [f"layer {l + 1}" for l in range(trace.n_layers)]
    charts = {
        "glyph_net_cum.svg": ("Cumulative net", "net", trace.net_cum),
        "glyph_entropy.svg": ("Per-step entropy", "entropy", trace.entropy_step),
        "glyph_flow.svg": ("Knowledge flow", "flow norm", trace.flow_norm),
        "glyph_z_norm.svg": ("Knowledge norm", "z norm", trace.z_norm),
    }
    for filename, (title, y_label, matrix) in charts.items():
        series = [Series(names[l], trace.steps, matrix[:, l], COLORS[l % len(COLORS)])
                  for l in range(trace.n_layers)]
        markers = []
        if filename == "glyph_net_cum.svg":
            for l in range(trace.n_layers):
                markers += [Marker(x, 0.0, label="crossing")
                            for x in ska.find_zero_crossings(trace, l)]
        path = OUT / filename
        path.write_text(line_chart(series, title=title, x_label="step",
                                   y_label=y_label, markers=markers))
        print(f"chart: {path}")


if __name__ == "__main__":
    main()
