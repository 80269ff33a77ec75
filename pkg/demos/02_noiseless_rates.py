#!/usr/bin/env python3
"""Noiseless rate theory: the fixed point, the rate curve, and its two routes.

The best constrained source flashes with probability a after every clear
window and never inside one; its rate H_b(a) / (1 + L a) peaks at the unique
root of a = (1 - a)^(L+1). The same peak value is log2 of the constraint
graph's spectral radius, computed here independently by power iteration.
"""

import numpy as np

from p300channel import (constrained_family_rate, entropy_rate, fixed_point_a,
                         maxentropic_source, noiseless_rate, rll_capacity_perron,
                         stationary_distribution)

print("L   a*          rate (closed)  rate (Perron)  gap")
for L in range(7):
    a = fixed_point_a(L)
    closed = noiseless_rate(L).rate
    perron = rll_capacity_perron(L).rate
    print(f"{L}   {a:.8f}  {closed:.9f}    {perron:.9f}   {abs(closed - perron):.1e}")

print("\nL = 1 closes the golden-ratio loop:")
a1 = fixed_point_a(1)
print(f"  1 - a* = {1 - a1:.12f} = 1/phi,  rate = log2(phi) = "
      f"{np.log2((1 + np.sqrt(5)) / 2):.12f}")

# the curve is strictly below its peak away from a*
L = 2
a_star = fixed_point_a(L)
best = noiseless_rate(L).rate
print(f"\nrate along the constrained family at L={L} (peak {best:.6f} at a*={a_star:.5f}):")
for a in (0.1, 0.2, a_star, 0.45, 0.6, 0.8):
    marker = "  <- a*" if abs(a - a_star) < 1e-9 else ""
    print(f"  a={a:.5f}  rate={constrained_family_rate(a, L):.6f}{marker}")

# the optimal source actually achieves the peak as a Markov entropy rate
print("\nachievability:")
for L in (1, 2, 3):
    src = maxentropic_source(L)
    h = entropy_rate(src)
    pi = stationary_distribution(src)
    ones = float(pi @ src.p1)
    print(f"  L={L}: entropy rate {h:.9f} = max rate {noiseless_rate(L).rate:.9f}; "
          f"stationary flash frequency {ones:.5f} = a*/(1+L a*)")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    grid = np.linspace(1e-4, 1 - 1e-4, 400)
    for L in (0, 1, 2, 3):
        ax.plot(grid, [constrained_family_rate(a, L) for a in grid], label=f"L={L}")
        a = fixed_point_a(L)
        ax.plot(a, noiseless_rate(L).rate, "k.", ms=8)
    ax.set_xlabel("flash probability a")
    ax.set_ylabel("bits per flash")
    ax.set_title("constrained-family rate; dots at the fixed points")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo02_rate_curves.png", dpi=130)
    print("\nwrote demo02_rate_curves.png")
except ImportError:
    print("\n(matplotlib not installed; skipping the plot)")
