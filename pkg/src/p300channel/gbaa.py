"""Noisy-channel information rates: trellis-based estimation and source optimization.

The rate of a Markov source over the gate-plus-noise channel is estimated
from one long simulated realization: a scaled forward recursion over the
joint input-history trellis gives -log2 p(y_1^n), and the conditional term
-log2 p(y_1^n | x_1^n) has a closed per-symbol form for each noise law.

The optimizer iterates the stochastic generalization of the Blahut-Arimoto
update: forward-backward posteriors turn the simulated block into a noisy
adjacency weight per trellis edge, and the maxentropic rule on that weighted
graph (Perron eigenvector scaling) produces the next transition matrix. In
the noiseless limit the weights collapse to the constraint graph and the
update reproduces the closed-form optimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (AwgnNoise, BinarySymmetric, ChannelSpec, ChannelState, GROUND,
                      Noiseless, NoiseLaw, build_trellis, fsm_response, apply_noise)
from .rates import ConvergenceError, binary_entropy, perron_pair
from .sources import MarkovSource, recurrent_classes


@dataclass(frozen=True)
class RateEstimate:
    """Simulated rate in bits per flash with a block-resampled standard error."""

    rate: float
    std_err: float
    sample_len: int


@dataclass(frozen=True)
class GbaaConfig:
    order: int
    sample_len: int = 50_000
    max_iters: int = 40
    rate_tol: float = 1e-6   # keep well below the Monte Carlo std err or it fires on noise
    seed: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.sample_len < 100:
            raise ValueError(f"sample_len too small: {self.sample_len}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.rate_tol > 0:
            raise ValueError(f"rate_tol must be positive, got {self.rate_tol}")


def conditional_entropy_per_symbol(noise: NoiseLaw) -> float:
    """Closed-form (1/n) E[-log2 p(Y|X)]: differential entropy for AWGN, H_b for BSC."""
    if isinstance(noise, Noiseless):
        return 0.0
    if isinstance(noise, BinarySymmetric):
        return binary_entropy(noise.crossover)
    if isinstance(noise, AwgnNoise):
        return float(0.5 * np.log2(2.0 * np.pi * np.e * noise.variance))
    raise TypeError(f"unknown noise law: {noise!r}")


def _emission_table(y: np.ndarray, noise: NoiseLaw) -> np.ndarray:
    """f[t, z] = p(y_t | Z_t = z) for z in {0, 1} (a density for AWGN)."""
    n = y.shape[0]
    f = np.empty((n, 2))
    if isinstance(noise, Noiseless):
        f[:, 0] = y == 0
        f[:, 1] = y == 1
    elif isinstance(noise, BinarySymmetric):
        eps = noise.crossover
        f[:, 0] = np.where(y == 0, 1.0 - eps, eps)
        f[:, 1] = np.where(y == 1, 1.0 - eps, eps)
    elif isinstance(noise, AwgnNoise):
        norm = 1.0 / np.sqrt(2.0 * np.pi * noise.variance)
        inv2v = 0.5 / noise.variance
        f[:, 0] = norm * np.exp(-inv2v * y ** 2)
        f[:, 1] = norm * np.exp(-inv2v * (y - 1.0) ** 2)
    else:
        raise TypeError(f"unknown noise law: {noise!r}")
    return f


class _JointTrellis:
    """Edge-array view of the joint trellis for one source/channel pair."""

    def __init__(self, source: MarkovSource, channel: ChannelSpec):
        trellis = build_trellis(source.order, channel.refractory_len)
        S = trellis.num_states
        states = np.repeat(np.arange(S), 2)
        inputs = np.tile(np.array([0, 1]), S)
        self.memory = trellis.memory
        self.num_states = S
        self.edge_from = states
        self.edge_input = inputs
        self.edge_to = trellis.next_state[states, inputs]
        self.edge_z = trellis.z_out[states, inputs].astype(np.int64)
        self.set_source(source)

    def set_source(self, source: MarkovSource):
        rmask = source.num_histories - 1
        p1 = source.p1[self.edge_from & rmask]
        self.edge_prob = np.where(self.edge_input == 1, p1, 1.0 - p1)


def _scaled_forward(jt: _JointTrellis, f: np.ndarray, h0: int = 0):
    """Normalized forward recursion; returns (alphas, per-step log2 scale factors)."""
    n = f.shape[0]
    S = jt.num_states
    alphas = np.zeros((n + 1, S))
    alphas[0, h0] = 1.0
    log2c = np.empty(n)
    like = f[:, jt.edge_z]           # (n, E)
    ef, et, ep = jt.edge_from, jt.edge_to, jt.edge_prob
    for t in range(n):
        w = alphas[t, ef] * ep * like[t]
        a = np.bincount(et, weights=w, minlength=S)
        c = a.sum()
        if c <= 0.0 or not np.isfinite(c):
            raise ConvergenceError(f"forward recursion collapsed at step {t}")
        alphas[t + 1] = a / c
        log2c[t] = np.log2(c)
    return alphas, log2c


def _scaled_backward(jt: _JointTrellis, f: np.ndarray) -> np.ndarray:
    n = f.shape[0]
    S = jt.num_states
    betas = np.empty((n + 1, S))
    betas[n] = 1.0 / S
    like = f[:, jt.edge_z]
    ef, et, ep = jt.edge_from, jt.edge_to, jt.edge_prob
    for t in range(n - 1, -1, -1):
        w = betas[t + 1, et] * ep * like[t]
        b = np.bincount(ef, weights=w, minlength=S)
        s = b.sum()
        if s <= 0.0 or not np.isfinite(s):
            raise ConvergenceError(f"backward recursion collapsed at step {t}")
        betas[t] = b / s
    return betas


def _check_single_recurrent_class(source: MarkovSource):
    classes = recurrent_classes(source)
    if len(classes) != 1:
        raise ValueError(
            f"source chain has {len(classes)} recurrent classes; rate is ill-defined"
        )


def _simulate_block(source: MarkovSource, channel: ChannelSpec, n: int,
                    rng: np.random.Generator, s0: ChannelState):
    x = source.sample(n, rng, init="zeros")
    z = fsm_response(x, channel.refractory_len, s0)
    y = apply_noise(z, channel.noise, rng)
    return x, z, y


def _rate_from_scales(log2c: np.ndarray, h_cond: float, n_blocks: int):
    """Information rate and block standard error from forward scale factors."""
    n = log2c.size
    rate = float(-log2c.mean() - h_cond)
    n_blocks = min(n_blocks, n)
    ends = np.linspace(0, n, n_blocks + 1, dtype=int)
    block_means = np.array([-log2c[a:b].mean() for a, b in zip(ends[:-1], ends[1:])])
    std_err = float(block_means.std(ddof=1) / np.sqrt(n_blocks)) if n_blocks > 1 else 0.0
    return rate, std_err


def estimate_rate(source: MarkovSource, channel: ChannelSpec, n: int, seed: int,
                  s0: ChannelState = GROUND, n_blocks: int = 20) -> RateEstimate:
    """Estimate the information rate of ``source`` over ``channel`` in bits/flash.

    One length-n realization is simulated; (1/n)(-log2 p(y_1^n)) comes from
    the scaled forward recursion and the conditional term from its closed
    form. The difference is clipped to [0, 1].
    """
    _check_single_recurrent_class(source)
    rng = np.random.default_rng(seed)
    _, _, y = _simulate_block(source, channel, n, rng, s0)
    jt = _JointTrellis(source, channel)
    f = _emission_table(np.asarray(y, dtype=np.float64), channel.noise)
    _, log2c = _scaled_forward(jt, f)
    rate, std_err = _rate_from_scales(log2c, conditional_entropy_per_symbol(channel.noise), n_blocks)
    return RateEstimate(rate=float(np.clip(rate, 0.0, 1.0)), std_err=std_err, sample_len=n)


def _edge_weights(jt: _JointTrellis, alphas: np.ndarray, betas: np.ndarray,
                  f: np.ndarray) -> np.ndarray:
    """Expected noisy-adjacency weight per edge from posterior branch statistics.

    For each edge the metric T is the expected log a-posteriori branch
    probability given that the edge is traversed,
    E[ log2 P(S_t | S_{t-1}, y_1^n) | edge ], estimated with posterior weights
    (sigma_t is exactly E[1{edge at t} | y], so the weighted average is the
    same conditional mean with lower variance). In the noiseless limit T = 0
    on support edges and the weight matrix collapses to the constraint-graph
    adjacency; with a single state the update reduces to the memoryless
    Blahut-Arimoto rule q' being proportional to 2^T. Edges with no posterior
    mass get weight 0 and stay off the graph.
    """
    n = f.shape[0]
    E = jt.edge_from.size
    like = f[:, jt.edge_z]
    sigma = alphas[:-1][:, jt.edge_from] * jt.edge_prob * like * betas[1:][:, jt.edge_to]
    norm = sigma.sum(axis=1, keepdims=True)
    if np.any(norm <= 0.0):
        raise ConvergenceError("posterior normalization collapsed")
    sigma /= norm
    gamma = np.zeros((n, jt.num_states))
    for e in range(E):
        gamma[:, jt.edge_from[e]] += sigma[:, e]
    weights = np.zeros(E)
    visits = sigma.sum(axis=0)
    for e in range(E):
        if visits[e] <= 0.0 or jt.edge_prob[e] <= 0.0:
            continue
        se = sigma[:, e]
        mask = se > 0.0
        ratio = se[mask] / gamma[mask, jt.edge_from[e]]
        t_e = np.sum(se[mask] * np.log2(ratio)) / visits[e]
        weights[e] = 2.0 ** t_e
    return weights


def _maxentropic_update(jt: _JointTrellis, weights: np.ndarray) -> np.ndarray:
    """New P(1 | history) from the Perron pair of the weighted edge graph."""
    S = jt.num_states
    W = np.zeros((S, S))
    W[jt.edge_from, jt.edge_to] = weights
    lam, v = perron_pair(W)
    p1 = np.full(S, 0.5)
    tiny = 1e-300
    for s in range(S):
        if v[s] <= tiny:
            continue   # state unreachable under the updated chain; leave neutral
        e0, e1 = 2 * s, 2 * s + 1
        w0 = weights[e0] * v[jt.edge_to[e0]]
        w1 = weights[e1] * v[jt.edge_to[e1]]
        total = w0 + w1
        p1[s] = w1 / total if total > 0.0 else 0.0
    return np.clip(p1, 0.0, 1.0)


def gbaa_optimize(channel: ChannelSpec, cfg: GbaaConfig
                  ) -> tuple[MarkovSource, RateEstimate, list[float]]:
    """Optimize an order-r Markov source for ``channel``.

    Starts from the uniform source and alternates simulation, forward-backward
    edge statistics, and the maxentropic update on the weighted graph. Stops
    when the rate trace stagnates below ``rate_tol`` or after ``max_iters``
    iterations. Per-iteration rates fluctuate by the Monte Carlo error, so the
    best-by-trace and final iterates are re-scored on fresh, longer samples
    and the better of the two is returned with its unbiased estimate plus the
    full per-iteration trace.
    """
    L = channel.refractory_len
    if cfg.order < L:
        raise ValueError(
            f"order {cfg.order} < channel memory {L}: the maxentropic update is "
            f"only defined when the source remembers at least the channel window"
        )
    rng = np.random.default_rng(cfg.seed)
    source = MarkovSource.uniform(cfg.order)
    h_cond = conditional_entropy_per_symbol(channel.noise)
    iterates: list[MarkovSource] = []
    trace: list[float] = []
    for _ in range(cfg.max_iters):
        _, _, y = _simulate_block(source, channel, cfg.sample_len, rng, GROUND)
        jt = _JointTrellis(source, channel)
        f = _emission_table(np.asarray(y, dtype=np.float64), channel.noise)
        alphas, log2c = _scaled_forward(jt, f)
        rate, _ = _rate_from_scales(log2c, h_cond, n_blocks=20)
        iterates.append(source)
        trace.append(float(np.clip(rate, 0.0, 1.0)))
        betas = _scaled_backward(jt, f)
        weights = _edge_weights(jt, alphas, betas, f)
        source = MarkovSource(cfg.order, _maxentropic_update(jt, weights))
        if len(trace) >= 2 and abs(trace[-1] - trace[-2]) < cfg.rate_tol:
            break

    candidates = {int(np.argmax(trace)), len(trace) - 1}
    eval_len = max(4 * cfg.sample_len, 100_000)
    best_source, best_est = None, None
    for idx in sorted(candidates):
        eval_seed = int(np.random.SeedSequence([cfg.seed, idx, eval_len]).generate_state(1)[0])
        est = estimate_rate(iterates[idx], channel, eval_len, eval_seed)
        if best_est is None or est.rate > best_est.rate:
            best_source, best_est = iterates[idx], est
    return best_source, best_est, trace
