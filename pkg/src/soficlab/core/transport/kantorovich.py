from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np
import ot

from soficlab.core.oracles.alphabet import Pattern
from soficlab.core.oracles.distribution import TOLERANCE, WindowDistribution

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 1_000_000


class Criterion(str, Enum):
    """Which side of the truncation sandwich an epsilon test is judged on.

    WINDOW compares the window value l_m with epsilon; UPPER compares
    l_m + 1/(m+1), which bounds the distance on the full shift.
    """

    WINDOW = "window"
    UPPER = "upper"


def ground_distance(s: Sequence[int], t: Sequence[int]) -> float:
    """max over i of (1/i)[s_i != t_i], coordinates numbered from 1.

    Raises:
        ValueError: if the patterns have different lengths.
    """
    if len(s) != len(t):
        raise ValueError(f"Patterns have different lengths: {len(s)} != {len(t)}")
    for i, (a, b) in enumerate(zip(s, t), start=1):
        if a != b:
            return 1.0 / i
    return 0.0


def cost_matrix(patterns_a: np.ndarray, patterns_b: np.ndarray) -> np.ndarray:
    """Ground distances between two stacks of patterns, shapes (Na, m) and (Nb, m)."""
    if patterns_a.shape[1] != patterns_b.shape[1]:
        raise ValueError("Pattern stacks have different window sizes")
    differ = patterns_a[:, None, :] != patterns_b[None, :, :]
    # the weight 1/i is decreasing, so the sup is attained at the first difference
    first = np.argmax(differ, axis=2)
    return np.where(differ.any(axis=2), 1.0 / (first + 1.0), 0.0)


def transport_value(a: np.ndarray, b: np.ndarray, costs: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact optimal transport between weight vectors with a network simplex solver.

    Returns:
        tuple[float, np.ndarray]: the optimal cost and plan.
    """
    a = a / a.sum()
    b = b / b.sum()
    plan, log = ot.emd(a, b, costs, numItermax=MAX_ITERATIONS, log=True)
    if log.get("warning"):
        logger.warning("Transport solver: %s", log["warning"])
    return math.fsum((plan * costs).ravel()), plan


@dataclass(frozen=True)
class Coupling:
    """A sparse joint law on pattern pairs."""

    m: int
    entries: dict[tuple[Pattern, Pattern], float]

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def left_marginal(self) -> dict[Pattern, float]:
        out: dict[Pattern, float] = {}
        for (s, _), p in self.entries.items():
            out[s] = out.get(s, 0.0) + p
        return out

    def right_marginal(self) -> dict[Pattern, float]:
        out: dict[Pattern, float] = {}
        for (_, t), p in self.entries.items():
            out[t] = out.get(t, 0.0) + p
        return out

    def cost(self) -> float:
        return math.fsum(p * ground_distance(s, t) for (s, t), p in self.entries.items())


def metric_sandwich(l_m: float, m: int) -> tuple[float, float]:
    """Bounds on the full-shift distance from a window value: (l_m, l_m + 1/(m+1))."""
    if l_m < 0:
        raise ValueError(f"Window distance must be nonnegative, got {l_m}")
    return (l_m, l_m + 1.0 / (m + 1))


@dataclass(frozen=True)
class DistanceCertificate:
    """The window distance l_m, its sandwich and an optimal coupling."""

    m: int
    value: float
    coupling: Coupling

    @property
    def lower(self) -> float:
        return self.value

    @property
    def upper(self) -> float:
        return metric_sandwich(self.value, self.m)[1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "coupling_nnz": self.coupling.nnz,
        }


def kantorovich(d1: WindowDistribution, d2: WindowDistribution) -> DistanceCertificate:
    """Exact Kantorovich distance between two window distributions.

    Supports are kept in lexicographic order of symbol indices, which fixes
    the returned coupling. Equal inputs short-circuit to the identity coupling.

    Example usage:
        ``` py
        ab = Alphabet.of("ab")
        cert = kantorovich(WindowDistribution.dirac(ab, (0,)), WindowDistribution.dirac(ab, (1,)))
        assert cert.value == 1.0
        ```

    Args:
        d1 (WindowDistribution): first distribution.
        d2 (WindowDistribution): second distribution.

    Raises:
        ValueError: if the windows or alphabets differ.

    Returns:
        DistanceCertificate: value, sandwich bounds and optimal coupling.
    """
    d1._check_compatible(d2)
    if d1 == d2:
        return DistanceCertificate(
            m=d1.m,
            value=0.0,
            coupling=Coupling(d1.m, {(s, s): float(p) for s, p in d1.mass.items()}),
        )
    support_a, support_b = d1.support(), d2.support()
    costs = cost_matrix(d1.patterns_array(), d2.patterns_array())
    value, plan = transport_value(d1.weights(), d2.weights(), costs)
    rows, cols = np.nonzero(plan > 0)
    entries = {
        (support_a[i], support_b[j]): float(plan[i, j]) for i, j in zip(rows.tolist(), cols.tolist())
    }
    return DistanceCertificate(m=d1.m, value=max(value, 0.0), coupling=Coupling(d1.m, entries))


def total_variation(d1: WindowDistribution, d2: WindowDistribution) -> float:
    """Total variation distance; an upper bound for `kantorovich` since costs are at most 1."""
    return d1.total_variation(d2)


def close_value(
    value: float, m: int, epsilon: float, criterion: Criterion | str = Criterion.WINDOW
) -> bool:
    """The epsilon-closeness predicate on a window value l_m.

    Ties within TOLERANCE count as close.
    """
    criterion = Criterion(criterion)
    bound = value if criterion is Criterion.WINDOW else metric_sandwich(value, m)[1]
    return bound < epsilon + TOLERANCE


def close(
    cert: DistanceCertificate, epsilon: float, criterion: Criterion | str = Criterion.WINDOW
) -> bool:
    return close_value(cert.value, cert.m, epsilon, criterion)
