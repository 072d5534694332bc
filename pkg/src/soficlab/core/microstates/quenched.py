from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from soficlab.core.microstates.counting import FitKernel
from soficlab.core.microstates.microstate import Microstate
from soficlab.core.models import FiniteModel
from soficlab.core.oracles import TOLERANCE, Alphabet, CylinderOracle, product_oracle
from soficlab.core.tasks import child_rng, run_tasks
from soficlab.core.transport import Criterion, close_value, kantorovich

logger = logging.getLogger(__name__)


class MicrostateSampler(ABC):
    """A law eta on labelings A^V."""

    def __init__(self, alphabet: Alphabet) -> None:
        self.alphabet = alphabet

    @abstractmethod
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw one labeling of n vertices as symbol indices."""
        ...

    @abstractmethod
    def spec(self) -> dict[str, Any]: ...


class IidSampler(MicrostateSampler):
    """Independent labels with a fixed one-symbol law."""

    def __init__(self, alphabet: Alphabet, base: Sequence[float] | None = None) -> None:
        super().__init__(alphabet)
        if base is None:
            base = [1.0 / alphabet.size] * alphabet.size
        probs = np.asarray(base, dtype=np.float64)
        if probs.shape != (alphabet.size,) or (probs < 0).any():
            raise ValueError(f"Sampler base needs {alphabet.size} nonnegative masses")
        if abs(probs.sum() - 1.0) > TOLERANCE:
            raise ValueError(f"Sampler base sums to {probs.sum()}, expected 1")
        self.base = probs / probs.sum()

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(self.alphabet.size, size=n, p=self.base)

    def spec(self) -> dict[str, Any]:
        return {
            "kind": "iid",
            "base": {s: float(p) for s, p in zip(self.alphabet.symbols, self.base)},
        }


class ExplicitSampler(MicrostateSampler):
    """A finite list of labelings with weights; one labeling is a Dirac sampler."""

    def __init__(
        self,
        alphabet: Alphabet,
        labelings: Sequence[Sequence[int] | np.ndarray],
        weights: Sequence[float] | None = None,
    ) -> None:
        super().__init__(alphabet)
        if not labelings:
            raise ValueError("An explicit sampler needs at least one labeling")
        self.labelings = [np.asarray(t, dtype=np.int64) for t in labelings]
        sizes = {t.size for t in self.labelings}
        if len(sizes) != 1:
            raise ValueError(f"Labelings have different sizes: {sorted(sizes)}")
        for t in self.labelings:
            if t.min() < 0 or t.max() >= alphabet.size:
                raise ValueError("Labeling uses symbols outside the alphabet")
        if weights is None:
            weights = [1.0 / len(labelings)] * len(labelings)
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (len(labelings),) or (w < 0).any() or abs(w.sum() - 1.0) > TOLERANCE:
            raise ValueError("Sampler weights must be a probability vector, one per labeling")
        self.weights = w / w.sum()

    @classmethod
    def dirac(cls, tau: Microstate) -> ExplicitSampler:
        return cls(tau.alphabet, [tau.labels])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n != self.labelings[0].size:
            raise ValueError(f"Sampler holds labelings of size {self.labelings[0].size}, not {n}")
        if len(self.labelings) == 1:
            return self.labelings[0]
        return self.labelings[int(rng.choice(len(self.labelings), p=self.weights))]

    def spec(self) -> dict[str, Any]:
        return {
            "kind": "explicit",
            "labelings": [self.alphabet.format_pattern(t.tolist()) for t in self.labelings],
            "weights": self.weights.tolist(),
        }


def sampler_from_spec(spec: Mapping[str, Any], alphabet: Alphabet) -> MicrostateSampler:
    """Build a sampler from {"kind": "iid", "base": {...}} or {"kind": "explicit", "labelings": [...]}.

    A missing iid base means uniform.
    """
    kind = spec.get("kind")
    if kind == "iid":
        base = spec.get("base")
        if base is None:
            return IidSampler(alphabet)
        return IidSampler(alphabet, [float(base.get(s, 0.0)) for s in alphabet.symbols])
    if kind == "explicit":
        if "labelings" not in spec:
            raise ValueError("Sampler kind 'explicit' requires field 'labelings'")
        labelings = [alphabet.encode(t) for t in spec["labelings"]]
        return ExplicitSampler(alphabet, labelings, spec.get("weights"))
    raise ValueError(f"Unknown sampler kind {kind!r}")


@dataclass(frozen=True)
class DQReport:
    """Doubly-quenched test of one model.

    `mass` estimates eta x eta(W_eps), the share of paired microstates whose
    empirical law is epsilon-close to the product target; the pooled fields
    are the distance between the averaged empirical law and that target.
    """

    m: int
    epsilon: float
    criterion: Criterion
    pairs: int
    seed: int
    good: int
    mean_fit: float
    pooled_lower: float
    pooled_upper: float

    @property
    def mass(self) -> float:
        return self.good / self.pairs

    @property
    def pooled_close(self) -> bool:
        return close_value(self.pooled_lower, self.m, self.epsilon, self.criterion)

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "epsilon": self.epsilon,
            "criterion": self.criterion.value,
            "pairs": self.pairs,
            "seed": self.seed,
            "good": self.good,
            "mass": self.mass,
            "mean_fit": self.mean_fit,
            "pooled_lower": self.pooled_lower,
            "pooled_upper": self.pooled_upper,
            "pooled_close": self.pooled_close,
        }


def dq_test(
    model: FiniteModel,
    sampler: MicrostateSampler,
    oracle: CylinderOracle,
    m: int,
    epsilon: float,
    pairs: int,
    seed: int,
    criterion: Criterion | str = Criterion.WINDOW,
    jobs: int = 1,
) -> DQReport:
    """Estimate the mass of W_eps and the pooled fit for microstate pairs drawn from eta x eta.

    Pair p draws (tau1, tau2) from its own generator derived from (seed, p),
    forms xi(v) = (tau1(v), tau2(v)) and fits xi against the product of the
    oracle with itself.

    Raises:
        ValueError: if pairs < 1 or the sampler alphabet differs from the oracle's.
    """
    criterion = Criterion(criterion)
    if pairs < 1:
        raise ValueError(f"Need at least one pair, got {pairs}")
    if sampler.alphabet != oracle.alphabet:
        raise ValueError("Sampler and oracle alphabets differ")
    kernel = FitKernel(model, product_oracle(oracle, oracle), m)
    n, k = model.size, oracle.alphabet.size

    def run_pair(p: int) -> tuple[float, Counter]:
        rng = child_rng(seed, "dq", p)
        tau1 = sampler.sample(n, rng)
        tau2 = sampler.sample(n, rng)
        codes, counts = np.unique(kernel.vertex_codes(tau1 * k + tau2), return_counts=True)
        return kernel.value(codes, counts), Counter(dict(zip(codes.tolist(), counts.tolist())))

    results = run_tasks(run_pair, list(range(pairs)), jobs)
    good = sum(1 for value, _ in results if close_value(value, m, epsilon, criterion))
    pooled: Counter = Counter()
    for _, counts in results:
        pooled.update(counts)
    keys = sorted(pooled)
    pooled_law = kernel.distribution(np.array(keys, dtype=np.int64), np.array([pooled[c] for c in keys]))
    certificate = kantorovich(pooled_law, kernel.target)
    report = DQReport(
        m=m,
        epsilon=epsilon,
        criterion=criterion,
        pairs=pairs,
        seed=seed,
        good=good,
        mean_fit=math.fsum(value for value, _ in results) / pairs,
        pooled_lower=certificate.lower,
        pooled_upper=certificate.upper,
    )
    logger.info(
        "Quenched test on n=%d: %d of %d pairs close, pooled fit %.6g",
        n,
        good,
        pairs,
        certificate.value,
    )
    return report
