"""Eigenphase arc analysis: the single-query criterion and zero-overlap inputs.

Theta(W) is the length of the smallest arc on the unit circle containing all
eigenvalues of W. A pair (U, V) is perfectly distinguishable with one query
exactly when Theta(U^dag V) >= pi, equivalently when 0 lies in the convex
hull of the eigenvalues of U^dag V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ArcTooSmall, DimensionMismatch, Indistinguishable
from .linalg import TWO_PI, dagger, eig_unitary, mat, phase_distance

DEFAULT_TOL_ANGLE = 1e-8


@dataclass
class ArcInfo:
    """Smallest covering arc: length theta, endpoints, and witness indices.

    witness_phase_indices point into the sorted eigenphase array of the
    analyzed operator (one representative per endpoint).
    """

    theta: float
    start_phase: float
    end_phase: float
    witness_phase_indices: tuple[int, int]


def dedup_phases(phases, tol_angle: float = DEFAULT_TOL_ANGLE):
    """Cluster sorted phases circularly at tol_angle.

    Returns (representatives, member_index) where member_index[j] is the
    position in the sorted input of cluster j's first member.
    """
    p = np.sort(np.asarray(phases, dtype=float))
    if p.size == 0:
        raise ValueError("empty phase list")
    reps = [p[0]]
    first = [0]
    counts = [1]
    for i in range(1, p.size):
        if p[i] - reps[-1] <= tol_angle:
            counts[-1] += 1
        else:
            reps.append(p[i])
            first.append(i)
            counts.append(1)
    # wrap-around cluster: the top of the circle may continue the bottom
    if len(reps) > 1 and (p[0] + TWO_PI) - reps[-1] <= tol_angle:
        counts[0] += counts.pop()
        reps.pop()
        first.pop()
    return np.asarray(reps), first, counts


def arc_of_phases(phases, tol_angle: float = DEFAULT_TOL_ANGLE) -> ArcInfo:
    """Smallest covering arc of a set of phases in [0, 2pi)."""
    reps, first, _ = dedup_phases(phases, tol_angle)
    m = reps.size
    if m == 1:
        return ArcInfo(0.0, float(reps[0]), float(reps[0]), (first[0], first[0]))
    gaps = np.empty(m)
    gaps[:-1] = np.diff(reps)
    gaps[-1] = reps[0] + TWO_PI - reps[-1]
    j = int(np.argmax(gaps))
    start = (j + 1) % m
    theta = float(TWO_PI - gaps[j])
    return ArcInfo(theta, float(reps[start]), float(reps[j]), (first[start], first[j]))


def smallest_arc(U, tol_angle: float = DEFAULT_TOL_ANGLE) -> ArcInfo:
    """Theta(U) with endpoints, from the sorted deduplicated eigenphases."""
    dec = eig_unitary(U)
    return arc_of_phases(dec.phases, tol_angle)


def single_query_distinguishable(U, V, tol_angle: float = DEFAULT_TOL_ANGLE) -> bool:
    """True when Theta(U^dag V) >= pi (within tol_angle)."""
    a, b = mat(U), mat(V)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return smallest_arc(dagger(a) @ b, tol_angle).theta >= math.pi - tol_angle


def parallel_query_count(U, V, distinct_tol: float = 1e-9,
                         tol_angle: float = DEFAULT_TOL_ANGLE) -> int:
    """N = ceil(pi / Theta(U^dag V)): parallel copies needed for orthogonality."""
    if phase_distance(U, V) <= distinct_tol:
        raise Indistinguishable("operations agree up to a global phase")
    theta = smallest_arc(dagger(U) @ mat(V), tol_angle).theta
    if theta <= tol_angle:
        raise Indistinguishable("relative operation has a single eigenvalue")
    return max(1, math.ceil(math.pi / theta - 1e-12))


def min_achievable_overlap(theta: float) -> float:
    """min over unit psi of |<psi|T|psi>| for a normal T with arc theta.

    Equals the distance from 0 to the convex hull of the eigenvalues,
    which is cos(theta / 2) while theta < pi and 0 afterwards.
    """
    return max(0.0, math.cos(theta / 2.0))


def _pair_weights(z1: complex, z2: complex):
    """Weights (p, 1-p) minimizing |p z1 + (1-p) z2| for unit-circle points."""
    delta = z1 - z2
    denom = abs(delta) ** 2
    if denom < 1e-30:
        return 0.5, abs(z1)
    p = float(np.clip(-np.real(np.conj(delta) * z2) / denom, 0.0, 1.0))
    return p, abs(p * z1 + (1 - p) * z2)


def _triple_weights(z1: complex, z2: complex, z3: complex):
    """Barycentric weights with p1 z1 + p2 z2 + p3 z3 = 0, sum 1, or None."""
    A = np.array([[ (z1 - z3).real, (z2 - z3).real],
                  [ (z1 - z3).imag, (z2 - z3).imag]])
    rhs = np.array([-z3.real, -z3.imag])
    try:
        p12 = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        return None
    p = np.array([p12[0], p12[1], 1.0 - p12[0] - p12[1]])
    if np.any(p < -1e-12):
        return None
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if s <= 0:
        return None
    return p / s


def zero_overlap_state(T, tol_angle: float = DEFAULT_TOL_ANGLE,
                       residual_target: float = 1e-10) -> np.ndarray:
    """Unit state psi with <psi|T|psi> = 0, mixing at most 3 eigenvectors.

    Requires Theta(T) >= pi - tol_angle. The weights come from a planar
    convex-combination solve over eigenvalue pairs (near-antipodal) first,
    then triples; among exact solutions the one maximizing the smallest
    weight wins. If the arc is within tol_angle of pi but no exact
    combination exists, weights are clamped and the small residual remains
    in <psi|T|psi>; callers needing the achieved value should recompute it.
    """
    dec = eig_unitary(T)
    info = arc_of_phases(dec.phases, tol_angle)
    if info.theta < math.pi - tol_angle:
        raise ArcTooSmall(info.theta, min_achievable_overlap(info.theta))

    z = np.exp(1j * dec.phases)
    n = z.size

    exact = []     # (min_weight, indices, weights)
    clamped = []   # (residual, min_weight, indices, weights)
    for i, j in combinations(range(n), 2):
        p, resid = _pair_weights(z[i], z[j])
        w = np.array([p, 1.0 - p])
        entry = (resid, float(w.min()), (i, j), w)
        if resid <= residual_target:
            exact.append(entry[1:])
        else:
            clamped.append(entry)
    if not exact:
        for i, j, k in combinations(range(n), 3):
            w = _triple_weights(z[i], z[j], z[k])
            if w is None:
                continue
            resid = abs(w @ z[[i, j, k]])
            entry = (resid, float(w.min()), (i, j, k), w)
            if resid <= residual_target:
                exact.append(entry[1:])
            else:
                clamped.append(entry)

    if exact:
        _, idx, w = max(exact, key=lambda e: e[0])
    else:
        # arc barely short of pi: keep the best-residual candidate
        resid, _, idx, w = min(clamped, key=lambda e: (e[0], -e[1]))
    psi = dec.vectors[:, list(idx)] @ np.sqrt(w).astype(complex)
    return psi / np.linalg.norm(psi)


def eigenphase_rows(U, tol_angle: float = DEFAULT_TOL_ANGLE):
    """(index, phase, multiplicity) rows of the deduplicated spectrum."""
    dec = eig_unitary(U)
    reps, _, counts = dedup_phases(dec.phases, tol_angle)
    return [(k, float(reps[k]), int(counts[k])) for k in range(reps.size)]
