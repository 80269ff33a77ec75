#!/usr/bin/env python3
"""Walk through the refractory gate: states, outputs, and the run-length law.

A flash (input 1) elicits a response (z = 1) only from the ground state;
it then locks the gate for L steps. Zeros advance the lock until it
releases. The net effect: responses are separated by at least L zeros.
"""

import numpy as np

from p300channel import GROUND, build_trellis, fsm_response, fsm_run, fsm_step

L = 2
x = [1, 1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 1]

print(f"refractory length L = {L}")
print(f"input  x = {x}")
z, states = fsm_run(x, GROUND, L)
print(f"output z = {z.tolist()}")
print("states   =", " ".join("G" if s.is_ground else f"R{s.level}" for s in states))

# the same answer three ways: scalar fold, closed form, trellis walk
z_closed = fsm_response(x, L)
trellis = build_trellis(r=L, L=L)
z_walk = trellis.response(x)
assert np.array_equal(z, z_closed) and np.array_equal(z, z_walk)
print("\nfold, closed form, and trellis walk agree")

print(f"\ntrellis over the last {trellis.memory} inputs: {trellis.num_states} states")
for s in range(trellis.num_states):
    for b in (0, 1):
        print(f"  history {s:0{trellis.memory}b} --x={b}--> "
              f"{trellis.next_state[s, b]:0{trellis.memory}b}  (z={trellis.z_out[s, b]})")

# responses are (L, inf) run-length limited no matter how bursty the input
rng = np.random.default_rng(0)
worst = np.inf
for _ in range(2000):
    zz, _ = fsm_run(rng.integers(0, 2, size=40), GROUND, L)
    ones = np.flatnonzero(zz)
    if ones.size > 1:
        worst = min(worst, np.diff(ones).min() - 1)
print(f"\nminimum observed gap between responses over 2000 random inputs: "
      f"{int(worst)} (the gate guarantees >= {L})")

# single flashes always get through; repeated flashes are swallowed
print("\nburst demo:")
for pattern in ([1, 0, 0, 0, 1], [1, 1, 1, 1, 1]):
    zz, _ = fsm_run(pattern, GROUND, L)
    print(f"  x={pattern} -> z={zz.tolist()}")
