"""Noiseless information-rate theory for the refractory gate channel.

The gate output is a run-length-limited binary sequence (at least L zeros
between ones), so the noiseless maximum rate has a closed form: the best
member of the constrained source family attains max_a H_b(a) / (1 + L a),
whose maximizer solves a = (1 - a)^(L + 1). The same number is the base-2
log of the spectral radius of the constraint graph; both routes are kept as
independent computations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import AwgnNoise, BinarySymmetric, ChannelSpec, ChannelState, GROUND, Noiseless
from .sources import MarkovSource, stationary_distribution


class ConvergenceError(RuntimeError):
    """A numeric iteration failed to reach its tolerance."""


@dataclass(frozen=True)
class RateResult:
    """An information rate in bits per flash plus how it was obtained."""

    rate: float
    argmax_a: float | None = None
    method: str = "closed_form"   # closed_form | perron_root | brute_force | simulation | gbaa


def binary_entropy(p: float) -> float:
    """H_b(p) in bits, with the endpoint values defined as 0 by continuity."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def fixed_point_a(L: int) -> float:
    """The unique root of a = (1 - a)^(L + 1) in [0, 1].

    Bisection on the strictly increasing difference a - (1 - a)^(L + 1);
    the bracket is shrunk to floating-point resolution, far below the
    1e-12 contract.
    """
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")

    def f(a: float) -> float:
        return a - (1.0 - a) ** (L + 1)

    lo, hi = 0.0, 1.0
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def constrained_family_rate(a: float, L: int) -> float:
    """Entropy rate H_b(a) / (1 + L a) of the constrained family member."""
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")
    return binary_entropy(a) / (1.0 + L * a)


def noiseless_rate(L: int) -> RateResult:
    """Maximum noiseless rate: H_b(a*) / (1 + L a*) at the fixed point a*."""
    a_star = fixed_point_a(L)
    return RateResult(rate=constrained_family_rate(a_star, L), argmax_a=a_star,
                      method="closed_form")


# ---------------------------------------------------------------------------
# Constraint-graph route
# ---------------------------------------------------------------------------

def rll_adjacency(L: int) -> np.ndarray:
    """Adjacency matrix of the (L, inf) constraint graph.

    State i counts zeros emitted since the last 1, capped at the free state
    L. Emitting 0 advances i to i+1 (the free state stays put); emitting 1
    is only allowed from the free state and resets the count. For L = 0 the
    single free state carries both edges.
    """
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")
    A = np.zeros((L + 1, L + 1))
    for i in range(L):
        A[i, i + 1] += 1.0   # forced zero
    A[L, L] += 1.0           # zero from the free state
    A[L, 0] += 1.0           # a one restarts the zero count
    return A


def perron_pair(A: np.ndarray, tol: float = 1e-13, max_iters: int = 200_000):
    """Dominant eigenvalue and positive right eigenvector by power iteration.

    Raises :class:`ConvergenceError` if the residual does not reach
    ``tol * lam`` within ``max_iters`` sweeps.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("perron_pair needs a square matrix")
    if np.any(A < 0):
        raise ValueError("perron_pair needs a nonnegative matrix")
    v = np.full(A.shape[0], 1.0 / A.shape[0])
    lam = 1.0
    for _ in range(max_iters):
        w = A @ v
        s = w.sum()
        if s <= 0.0 or not np.isfinite(s):
            raise ConvergenceError("power iteration collapsed (zero or non-finite)")
        lam = s / v.sum()
        w /= s
        if np.max(np.abs(A @ w - lam * w)) <= tol * lam:
            return float(lam), w
        v = w
    raise ConvergenceError(
        f"power iteration did not converge in {max_iters} sweeps (lam ~ {lam:.6g})"
    )


def rll_capacity_perron(L: int) -> RateResult:
    """log2 of the constraint-graph spectral radius; equals noiseless_rate(L)."""
    lam, _ = perron_pair(rll_adjacency(L))
    return RateResult(rate=float(np.log2(lam)), argmax_a=None, method="perron_root")


def rll_maxentropic_emission(L: int) -> np.ndarray:
    """P(emit 1 | graph state) of the maxentropic chain on the constraint graph.

    Built from the Perron pair via p_edge = A_ij v_j / (lam v_i); only the
    free state can emit a 1.
    """
    lam, v = perron_pair(rll_adjacency(L))
    p_one = np.zeros(L + 1)
    p_one[L] = v[0] / (lam * v[L])
    return p_one


def maxentropic_source(L: int) -> MarkovSource:
    """The order-L constrained source at the fixed point a*; rate-optimal."""
    if L < 1:
        raise ValueError(f"maxentropic_source needs L >= 1, got {L}")
    return MarkovSource.constrained(L, fixed_point_a(L))


def entropy_rate(source: MarkovSource) -> float:
    """Markov entropy rate in bits: sum_h pi(h) H_b(P(1|h)) on the recurrent class."""
    pi = stationary_distribution(source)
    rate = 0.0
    for h in np.flatnonzero(pi > 0):
        rate += pi[h] * binary_entropy(source.p1[h])
    return float(rate)


# ---------------------------------------------------------------------------
# Exact finite-n mutual information by enumeration
# ---------------------------------------------------------------------------

MAX_BRUTE_FORCE_N = 14


def brute_force_mi(source: MarkovSource, channel: ChannelSpec, n: int,
                   s0: ChannelState = GROUND) -> float:
    """Exact I(X_1^n; Y_1^n | S_0 = s0) / n for binary-output channels.

    Enumerates all 2^n inputs with their Markov probabilities (source started
    from the all-zero history, matching the ground-state convention) and all
    reachable gate outputs. The output alphabet must be finite, so AWGN is
    rejected. A test instrument: n is capped at 14.
    """
    if isinstance(channel.noise, AwgnNoise):
        raise ValueError("brute_force_mi needs a finite output alphabet; AWGN rejected")
    if not 1 <= n <= MAX_BRUTE_FORCE_N:
        raise ValueError(f"n must lie in 1..{MAX_BRUTE_FORCE_N}, got {n}")
    L = channel.refractory_len
    if s0.level > L:
        raise ValueError(f"state R_{s0.level} does not exist for L={L}")

    rmask = source.num_histories - 1
    lmask = (1 << L) - 1
    xs = np.arange(1 << n, dtype=np.int64)
    probs = np.ones(1 << n)
    h = np.zeros(1 << n, dtype=np.int64)
    hz = np.full(1 << n, (1 << (s0.level - 1)) if s0.level >= 1 else 0, dtype=np.int64)
    zints = np.zeros(1 << n, dtype=np.int64)
    for t in range(n):
        bit = (xs >> (n - 1 - t)) & 1
        p1h = source.p1[h]
        probs *= np.where(bit == 1, p1h, 1.0 - p1h)
        z = bit & (hz == 0) if L > 0 else bit
        zints = (zints << 1) | z
        h = ((h << 1) | bit) & rmask
        if L > 0:
            hz = ((hz << 1) | bit) & lmask

    uz, inv = np.unique(zints, return_inverse=True)
    pz = np.bincount(inv, weights=probs, minlength=uz.size)
    keep = pz > 0
    uz, pz = uz[keep], pz[keep]

    eps = channel.noise.crossover if isinstance(channel.noise, BinarySymmetric) else 0.0
    if eps == 0.0:
        # y = z exactly, so I = H(Y) - H(Y|X) = H(Z)
        return float(-np.sum(pz * np.log2(pz)) / n)

    # H(Y): P(y) = sum_z P(z) eps^d(y,z) (1-eps)^(n-d); chunked over outputs
    popcount = np.array([bin(i).count("1") for i in range(1 << n)], dtype=np.int64)
    ratio = eps / (1.0 - eps)
    base = (1.0 - eps) ** n
    hy = 0.0
    chunk = max(1, (1 << 22) // uz.size)
    for lo in range(0, 1 << n, chunk):
        ys = np.arange(lo, min(lo + chunk, 1 << n), dtype=np.int64)
        d = popcount[np.bitwise_xor.outer(ys, uz)]
        py = (base * ratio ** d) @ pz
        hy -= np.sum(py * np.log2(py))
    return float((hy - n * binary_entropy(eps)) / n)


def exact_input_entropy(source: MarkovSource, n: int) -> float:
    """H(X_1^n)/n by enumeration, source started from the all-zero history."""
    if not 1 <= n <= MAX_BRUTE_FORCE_N:
        raise ValueError(f"n must lie in 1..{MAX_BRUTE_FORCE_N}, got {n}")
    rmask = source.num_histories - 1
    xs = np.arange(1 << n, dtype=np.int64)
    probs = np.ones(1 << n)
    h = np.zeros(1 << n, dtype=np.int64)
    for t in range(n):
        bit = (xs >> (n - 1 - t)) & 1
        p1h = source.p1[h]
        probs *= np.where(bit == 1, p1h, 1.0 - p1h)
        h = ((h << 1) | bit) & rmask
    probs = probs[probs > 0]
    return float(-np.sum(probs * np.log2(probs)) / n)
