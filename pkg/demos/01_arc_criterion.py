"""Eigenphase arcs and the single-query criterion.

Two unitaries can be told apart with one use exactly when the eigenvalues
of U^dag V fail to fit on any arc shorter than half the circle: then 0 lies
in their convex hull and some input state maps to orthogonal outputs.
"""

import numpy as np

from seqlocc import (
    eig_unitary,
    parallel_query_count,
    random_unitary,
    single_query_distinguishable,
    smallest_arc,
    zero_overlap_state,
)

rng = np.random.default_rng(0)

print("=== the arc of some familiar operators ===")
for name, M in [
    ("identity", np.eye(4, dtype=complex)),
    ("diag(1, -1)", np.diag([1, -1]).astype(complex)),
    ("diag(1, i)", np.diag([1, 1j]).astype(complex)),
    ("random 4x4", random_unitary(4, rng)),
]:
    info = smallest_arc(M)
    print(f"{name:12s}: theta = {info.theta:.6f}"
          f"  (arc from {info.start_phase:.4f} to {info.end_phase:.4f})")

print()
print("=== single-query distinguishability needs theta >= pi ===")
U = np.eye(2, dtype=complex)
for name, V in [("diag(1, -1)", np.diag([1, -1]).astype(complex)),
                ("diag(1, i)", np.diag([1, 1j]).astype(complex))]:
    ok = single_query_distinguishable(U, V)
    n = parallel_query_count(U, V)
    print(f"identity vs {name}: one query suffices: {ok};"
          f" parallel copies needed: {n}")

print()
print("=== a zero-overlap input state, read off the spectrum ===")
T = np.diag(np.exp(1j * np.array([0.0, 2 * np.pi / 3, -2 * np.pi / 3])))
psi = zero_overlap_state(T)
print("spectrum at the cube roots of unity; the balanced mixture works:")
print("  |psi| =", np.round(np.abs(psi), 6))
print("  <psi|T|psi> =", abs(np.vdot(psi, T @ psi)))

print()
print("=== arcs grow linearly under tensor powers (before wrapping) ===")
theta = 0.9
W = np.diag(np.exp(1j * np.array([0.0, 0.45, theta])))
Q = random_unitary(3, rng)
W = Q @ W @ Q.conj().T
T = np.eye(1, dtype=complex)
for n in range(1, 5):
    T = np.kron(T, W)
    print(f"  N = {n}: theta = {smallest_arc(T).theta:.9f}"
          f"   (N * theta = {n * theta:.9f})")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    dec = eig_unitary(Q @ np.diag(np.exp(1j * np.array([0.0, 0.45, 0.9]))) @ Q.conj().T)
    fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(4, 4))
    ax.plot(dec.phases, np.ones_like(dec.phases), "o")
    ax.set_title("eigenphases of W")
    fig.savefig("arc_demo.png", dpi=120, bbox_inches="tight")
    print()
    print("wrote arc_demo.png")
except ImportError:
    pass
