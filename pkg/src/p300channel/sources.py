"""Binary Markov sources conditioned on a fixed-length history window."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class ReducibleChainError(ValueError):
    """The history chain has more than one recurrent class."""


@dataclass(frozen=True, eq=False)
class MarkovSource:
    """Order-r binary Markov law P(X_n = 1 | last r bits).

    ``p1`` is indexed by the integer encoding of the history window with the
    most recent bit in the least significant position; ``p1[h]`` is the
    probability that the next bit is 1.
    """

    order: int
    p1: np.ndarray

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        p1 = np.asarray(self.p1, dtype=np.float64)
        if p1.shape != (1 << self.order,):
            raise ValueError(
                f"need {1 << self.order} history probabilities, got shape {p1.shape}"
            )
        if np.any(p1 < 0.0) or np.any(p1 > 1.0):
            raise ValueError("transition probabilities must lie in [0, 1]")
        object.__setattr__(self, "p1", p1)

    @classmethod
    def constrained(cls, order: int, a: float) -> "MarkovSource":
        """The run-length family member: P(1 | all-zero history) = a, else 0."""
        p1 = np.zeros(1 << order)
        p1[0] = a
        return cls(order, p1)

    @classmethod
    def uniform(cls, order: int) -> "MarkovSource":
        return cls(order, np.full(1 << order, 0.5))

    @property
    def num_histories(self) -> int:
        return 1 << self.order

    def transition_matrix(self) -> np.ndarray:
        """Chain on history integers: T[h, (h << 1 | x) & mask] = P(x | h)."""
        size = self.num_histories
        mask = size - 1
        T = np.zeros((size, size))
        h = np.arange(size)
        T[h, (h << 1) & mask] += 1.0 - self.p1
        T[h, ((h << 1) | 1) & mask] += self.p1
        return T

    def sample(self, n: int, rng: np.random.Generator, init="zeros") -> np.ndarray:
        """Draw a length-n realization.

        ``init`` selects the starting history: "zeros", "stationary", or an
        explicit history integer.
        """
        if init == "zeros":
            h = 0
        elif init == "stationary":
            pi = stationary_distribution(self)
            h = int(rng.choice(self.num_histories, p=pi))
        else:
            h = int(init)
            if not 0 <= h < self.num_histories:
                raise ValueError(f"history {h} out of range for order {self.order}")
        mask = self.num_histories - 1
        u = rng.random(n)
        p1 = self.p1
        out = np.empty(n, dtype=np.int8)
        for t in range(n):
            b = 1 if u[t] < p1[h] else 0
            out[t] = b
            h = ((h << 1) | b) & mask
        return out


def history_label(h: int, order: int) -> str:
    """Bitstring of a history integer, oldest bit first."""
    return format(h, f"0{order}b")


def history_from_label(label: str) -> int:
    if not label or set(label) - {"0", "1"}:
        raise ValueError(f"history label must be a nonempty bitstring, got {label!r}")
    return int(label, 2)


def recurrent_classes(source: MarkovSource) -> list[np.ndarray]:
    """Strongly connected classes of the history chain with no exit edges."""
    T = source.transition_matrix()
    n_comp, labels = connected_components(
        csr_matrix(T > 0), directed=True, connection="strong"
    )
    classes = []
    for c in range(n_comp):
        members = np.flatnonzero(labels == c)
        mass_outside = T[np.ix_(members, np.flatnonzero(labels != c))].sum()
        if mass_outside == 0.0:
            classes.append(members)
    return classes


def stationary_distribution(source: MarkovSource) -> np.ndarray:
    """Stationary law over all histories (zero on transient ones).

    Raises :class:`ReducibleChainError` when the chain has several recurrent
    classes and the stationary law is therefore not unique.
    """
    classes = recurrent_classes(source)
    if len(classes) != 1:
        raise ReducibleChainError(
            f"history chain has {len(classes)} recurrent classes; expected one"
        )
    members = classes[0]
    T = source.transition_matrix()[np.ix_(members, members)]
    k = len(members)
    # pi T = pi with sum(pi) = 1: replace one balance equation by normalization
    A = T.T - np.eye(k)
    A[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    pi_members = np.linalg.solve(A, b)
    pi_members = np.clip(pi_members, 0.0, None)
    pi_members /= pi_members.sum()
    pi = np.zeros(source.num_histories)
    pi[members] = pi_members
    return pi


def save_source(source: MarkovSource, path) -> None:
    """Write a source file: an order header then one `bitstring,prob` per history."""
    lines = [f"# order={source.order}"]
    for h in range(source.num_histories):
        lines.append(f"{history_label(h, source.order)},{float(source.p1[h])!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_source(path) -> MarkovSource:
    with open(path) as fh:
        raw = [line.strip() for line in fh if line.strip()]
    if not raw or not raw[0].startswith("# order="):
        raise ValueError(f"{path}: missing '# order=<r>' header")
    order = int(raw[0].split("=", 1)[1])
    if order < 1:
        raise ValueError(f"{path}: order must be >= 1, got {order}")
    p1 = np.full(1 << order, np.nan)
    for line in raw[1:]:
        label, _, prob = line.partition(",")
        h = history_from_label(label)
        if len(label) != order:
            raise ValueError(f"{path}: history {label!r} does not match order {order}")
        p1[h] = float(prob)
    if np.isnan(p1).any():
        missing = history_label(int(np.flatnonzero(np.isnan(p1))[0]), order)
        raise ValueError(f"{path}: missing probability for history {missing}")
    return MarkovSource(order, p1)
