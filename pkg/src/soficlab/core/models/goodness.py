from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import polars as pl

from soficlab.core.groups import Group
from soficlab.core.models.model import FiniteModel
from soficlab.core.models.permutation import hamming_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GoodnessReport:
    """How close a model is to a free almost-homomorphism on its first k elements.

    `separation_min` is the least Hamming distance between two distinct window
    elements and `defect_max` the largest Hamming distance between
    sigma^g o sigma^h and sigma^{gh}. Both are exact rationals.
    """

    k: int
    separation_min: Fraction
    defect_max: Fraction

    @property
    def passed(self) -> bool:
        threshold = Fraction(1, self.k)
        return self.separation_min > 1 - threshold and self.defect_max < threshold

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "pass": self.passed,
            "separation_min": float(self.separation_min),
            "defect_max": float(self.defect_max),
        }


def goodness(model: FiniteModel, k: int) -> GoodnessReport:
    """Check whether a model is k-good.

    A model is k-good when d_H(sigma^{gamma_i}, sigma^{gamma_j}) > 1 - 1/k for
    all i < j <= k and d_H(sigma^{gamma_i} o sigma^{gamma_j},
    sigma^{gamma_i gamma_j}) < 1/k for all i, j <= k.

    Example usage:
        ``` py
        report = goodness(cyclic_model(16), 5)
        assert report.passed
        ```

    Args:
        model (FiniteModel): the model to check.
        k (int): window size, at least 1.

    Raises:
        ValueError: if k < 1.

    Returns:
        GoodnessReport: exact separation and defect. With a single element
            there are no pairs and the separation is 1.
    """
    group = model.group
    elements = group.enumerate(k)
    perms = [model.evaluate(g) for g in elements]
    n = model.size

    separation = Fraction(1)
    for i in range(k):
        for j in range(i + 1, k):
            separation = min(separation, Fraction(hamming_count(perms[i], perms[j]), n))

    defect = Fraction(0)
    for i, g in enumerate(elements):
        for j, h in enumerate(elements):
            composed = perms[i].compose(perms[j])
            expected = model.evaluate(group.multiply(g, h))
            defect = max(defect, Fraction(hamming_count(composed, expected), n))

    return GoodnessReport(k=k, separation_min=separation, defect_max=defect)


@dataclass
class SoficApproximationSeq:
    """A finite stretch of a sofic approximation: models of one group with nondecreasing sizes."""

    models: list[FiniteModel]

    def __post_init__(self) -> None:
        if not self.models:
            raise ValueError("A sofic approximation sequence needs at least one model")
        group = self.models[0].group
        for index, model in enumerate(self.models):
            if model.group != group:
                raise ValueError(
                    f"Model {index} acts by {model.group}, the sequence is over {group}"
                )
            if index > 0 and model.size < self.models[index - 1].size:
                raise ValueError(
                    f"Model sizes must be nondecreasing, model {index} has size {model.size} "
                    f"after {self.models[index - 1].size}"
                )

    @classmethod
    def of(cls, models: Iterable[FiniteModel]) -> SoficApproximationSeq:
        return cls(list(models))

    @property
    def group(self) -> Group:
        return self.models[0].group

    @property
    def sizes(self) -> list[int]:
        return [model.size for model in self.models]

    def __len__(self) -> int:
        return len(self.models)

    def __getitem__(self, index: int) -> FiniteModel:
        return self.models[index]


@dataclass
class SequenceGoodness:
    """Goodness reports for every (model, k) plus the index from which each k holds."""

    sizes: list[int]
    reports: list[list[GoodnessReport]]
    attained: dict[int, int | None] = field(default_factory=dict)

    def to_frame(self) -> pl.DataFrame:
        rows = [
            {
                "index": index,
                "n": self.sizes[index],
                **report.to_dict(),
            }
            for index, row in enumerate(self.reports)
            for report in row
        ]
        return pl.DataFrame(
            rows,
            schema={
                "index": pl.Int64,
                "n": pl.Int64,
                "k": pl.Int64,
                "pass": pl.Boolean,
                "separation_min": pl.Float64,
                "defect_max": pl.Float64,
            },
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "sizes": self.sizes,
            "attained": {str(k): i0 for k, i0 in self.attained.items()},
            "reports": [[report.to_dict() for report in row] for row in self.reports],
        }


def sequence_goodness(
    seq: SoficApproximationSeq | Sequence[FiniteModel], k_max: int
) -> SequenceGoodness:
    """Goodness of every model for k = 1..k_max.

    For each k, `attained[k]` is the least 0-based index i0 such that every
    model from i0 to the end of the sequence is k-good, or None when the last
    model already fails.
    """
    if not isinstance(seq, SoficApproximationSeq):
        seq = SoficApproximationSeq(list(seq))
    if k_max < 1:
        raise ValueError(f"k_max must be positive, got {k_max}")

    reports = []
    for index, model in enumerate(seq.models):
        # finite groups cannot fill windows larger than their order
        order = model.group.order
        top = k_max if order is None else min(k_max, order)
        reports.append([goodness(model, k) for k in range(1, top + 1)])
        logger.debug("Model %d (n=%d): %s", index, model.size, [r.passed for r in reports[-1]])

    attained: dict[int, int | None] = {}
    for k in range(1, k_max + 1):
        i0: int | None = None
        for index in range(len(reports) - 1, -1, -1):
            row = reports[index]
            if k > len(row) or not row[k - 1].passed:
                break
            i0 = index
        attained[k] = i0
    return SequenceGoodness(sizes=seq.sizes, reports=reports, attained=attained)
