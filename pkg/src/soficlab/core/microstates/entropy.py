from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from soficlab.core.microstates.counting import FitKernel
from soficlab.core.models import FiniteModel
from soficlab.core.oracles import CylinderOracle
from soficlab.core.tasks import child_rng, chunks, run_tasks
from soficlab.core.transport import Criterion, close_value

logger = logging.getLogger(__name__)

EntropyMode = Literal["exact", "montecarlo"]

MAX_EXACT_LABELINGS = 2**24
EXACT_CHUNK = 2**16
MONTECARLO_CHUNK = 8192
# fewer good samples than this make the log-fraction estimate unreliable
HIGH_VARIANCE_GOOD = 30


@dataclass(frozen=True)
class EntropyEstimate:
    """Finite-scale microstate count: (1/n) log2 #{tau : fit(tau) is epsilon-close}.

    In exact mode `good` is the count itself. In montecarlo mode labelings
    are drawn uniformly from A^V, `good` is the number of close samples and
    the value is (1/n)(log2(good/samples) + n log2|A|). An empty good set
    has value -inf.
    """

    n: int
    m: int
    epsilon: float
    mode: EntropyMode
    criterion: Criterion
    alphabet_size: int
    samples: int
    good: int
    value: float
    stderr: float | None = None
    seed: int | None = None

    @property
    def fraction(self) -> float:
        return self.good / self.samples

    @property
    def high_variance(self) -> bool:
        return self.mode == "montecarlo" and self.good < HIGH_VARIANCE_GOOD

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "n": self.n,
            "m": self.m,
            "epsilon": self.epsilon,
            "mode": self.mode,
            "criterion": self.criterion.value,
            "alphabet_size": self.alphabet_size,
            "samples": self.samples,
            "count" if self.mode == "exact" else "good": self.good,
            "fraction": self.fraction,
            "value": self.value if math.isfinite(self.value) else None,
        }
        if self.mode == "montecarlo":
            out["stderr"] = self.stderr
            out["seed"] = self.seed
            out["high_variance"] = self.high_variance
        return out


def _multiset_counts(kernel: FitKernel, labels: np.ndarray) -> Counter:
    """Count labelings by the multiset of their vertex pattern codes.

    Labelings with the same multiset have the same empirical law, so the fit
    only has to be evaluated once per key.
    """
    codes = np.sort(kernel.vertex_codes(labels), axis=1)
    unique, counts = np.unique(codes, axis=0, return_counts=True)
    return Counter({row.tobytes(): int(c) for row, c in zip(unique, counts)})


def _count_good(
    kernel: FitKernel,
    keys: Counter,
    epsilon: float,
    criterion: Criterion,
) -> int:
    good = 0
    for key in sorted(keys):
        codes, counts = np.unique(np.frombuffer(key, dtype=np.int64), return_counts=True)
        if close_value(kernel.value(codes, counts), kernel.m, epsilon, criterion):
            good += keys[key]
    return good


def entropy_estimate(
    model: FiniteModel,
    oracle: CylinderOracle,
    m: int,
    epsilon: float,
    mode: EntropyMode = "exact",
    samples: int = 100_000,
    seed: int | None = None,
    criterion: Criterion | str = Criterion.WINDOW,
    jobs: int = 1,
) -> EntropyEstimate:
    """Count (or estimate the number of) microstates whose empirical law is epsilon-close to the oracle.

    Example usage:
        ``` py
        est = entropy_estimate(cyclic_model(16), oracle, m=1, epsilon=0.1)
        est.good  # 35750 for a fair coin
        ```

    Args:
        model (FiniteModel): the model whose labelings are counted.
        oracle (CylinderOracle): the target.
        m (int): window size.
        epsilon (float): closeness threshold.
        mode (EntropyMode, optional): "exact" enumerates A^V, "montecarlo" samples it.
            Defaults to "exact".
        samples (int, optional): montecarlo sample count. Defaults to 100_000.
        seed (int | None, optional): montecarlo seed, required in that mode.
        criterion (Criterion | str, optional): closeness criterion. Defaults to "window".
        jobs (int, optional): worker threads; never changes the result. Defaults to 1.

    Raises:
        ValueError: if |A|^n exceeds 2^24 in exact mode, or montecarlo runs without a seed.

    Returns:
        EntropyEstimate: the count and the normalized log-count.
    """
    criterion = Criterion(criterion)
    kernel = FitKernel(model, oracle, m)
    n, k = model.size, oracle.alphabet.size

    if mode == "exact":
        total = k**n
        if total > MAX_EXACT_LABELINGS:
            raise ValueError(
                f"Exact counting needs |A|^n <= 2^24, got {k}^{n}; use montecarlo mode"
            )
        digits = k ** np.arange(n - 1, -1, -1, dtype=np.int64)

        def exact_chunk(bounds: tuple[int, int]) -> Counter:
            index = np.arange(*bounds, dtype=np.int64)
            labels = (index[:, None] // digits[None, :]) % k
            return _multiset_counts(kernel, labels)

        parts = run_tasks(exact_chunk, chunks(total, EXACT_CHUNK), jobs)
        keys: Counter = sum(parts, Counter())
        good = _count_good(kernel, keys, epsilon, criterion)
        if good == total:
            value = math.log2(k)
        elif good == 0:
            value = -math.inf
        else:
            value = math.log2(good) / n
        logger.info("Exact count on n=%d: %d of %d labelings are close", n, good, total)
        return EntropyEstimate(
            n=n,
            m=m,
            epsilon=epsilon,
            mode="exact",
            criterion=criterion,
            alphabet_size=k,
            samples=total,
            good=good,
            value=value,
        )

    if mode != "montecarlo":
        raise ValueError(f"Unknown entropy mode {mode!r}")
    if seed is None:
        raise ValueError("Montecarlo entropy estimates need a seed")
    if samples < 1:
        raise ValueError(f"Sample count must be positive, got {samples}")

    def sample_chunk(task: tuple[int, tuple[int, int]]) -> Counter:
        index, (start, stop) = task
        rng = child_rng(seed, "entropy", index)
        return _multiset_counts(kernel, rng.integers(k, size=(stop - start, n)))

    tasks = list(enumerate(chunks(samples, MONTECARLO_CHUNK)))
    parts = run_tasks(sample_chunk, tasks, jobs)
    keys = sum(parts, Counter())
    good = _count_good(kernel, keys, epsilon, criterion)
    fraction = good / samples
    if good == 0:
        value, stderr = -math.inf, None
    else:
        value = math.log2(fraction) / n + math.log2(k)
        # delta method on log2(fraction)/n
        stderr = math.sqrt(fraction * (1 - fraction) / samples) / (fraction * math.log(2) * n)
    estimate = EntropyEstimate(
        n=n,
        m=m,
        epsilon=epsilon,
        mode="montecarlo",
        criterion=criterion,
        alphabet_size=k,
        samples=samples,
        good=good,
        value=value,
        stderr=stderr,
        seed=seed,
    )
    if estimate.high_variance:
        logger.warning(
            "Only %d of %d uniform samples are close; the estimate has high variance",
            good,
            samples,
        )
    return estimate
