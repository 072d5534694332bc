from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from soficlab.core.microstates.microstate import Microstate, empirical, fit, project_microstate
from soficlab.core.microstates.search import DEFAULT_BUDGET, SearchResult, search_microstate
from soficlab.core.models import FiniteModel, GoodnessReport, SoficApproximationSeq, goodness
from soficlab.core.oracles import (
    TOLERANCE,
    BlockCode,
    BlockCodeOracle,
    CylinderOracle,
    ObservableTower,
    power_oracle,
)
from soficlab.core.tasks import derive_seed, run_tasks
from soficlab.core.transport import Criterion, DistanceCertificate, close, kantorovich

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceRow:
    index: int
    n: int
    fit_lower: float
    fit_upper: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "n": self.n,
            "fit_lower": self.fit_lower,
            "fit_upper": self.fit_upper,
            "pass": self.passed,
        }


@dataclass
class ApproximabilityTrace:
    """Best searched fit per model of a sequence, with both approximability verdicts.

    `eventually_from` is the least index from which every model passes (the
    plain verdict over this finite stretch); `subsequence` lists every
    passing index (the weak verdict holds when it is nonempty). No relation
    between the two verdicts is asserted.
    """

    rows: list[TraceRow] = field(default_factory=list)

    @property
    def eventually_from(self) -> int | None:
        start = None
        for row in reversed(self.rows):
            if not row.passed:
                break
            start = row.index
        return start

    @property
    def subsequence(self) -> list[int]:
        return [row.index for row in self.rows if row.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows": [row.to_dict() for row in self.rows],
            "eventually_from": self.eventually_from,
            "all_eventually": self.eventually_from is not None,
            "subsequence": self.subsequence,
            "pass_on_subsequence": bool(self.subsequence),
        }


def approximability_trace(
    seq: SoficApproximationSeq | Sequence[FiniteModel],
    oracle: CylinderOracle,
    m: int,
    epsilon: float,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    criterion: Criterion | str = Criterion.WINDOW,
    jobs: int = 1,
) -> ApproximabilityTrace:
    """Run `search_microstate` on every model of a sequence.

    Model i searches with the seed derived from (seed, "trace", i), so the
    trace does not depend on `jobs`.
    """
    if not isinstance(seq, SoficApproximationSeq):
        seq = SoficApproximationSeq(list(seq))

    def run(index: int) -> TraceRow:
        model = seq.models[index]
        result = search_microstate(
            model, oracle, m, epsilon, budget, derive_seed(seed, "trace", index), criterion
        )
        logger.info("Trace model %d (n=%d): fit %.6g", index, model.size, result.certificate.value)
        return TraceRow(
            index=index,
            n=model.size,
            fit_lower=result.certificate.lower,
            fit_upper=result.certificate.upper,
            passed=result.passed,
        )

    return ApproximabilityTrace(rows=run_tasks(run, list(range(len(seq))), jobs))


def power_trace(
    seq: SoficApproximationSeq | Sequence[FiniteModel],
    oracle: CylinderOracle,
    n_max: int,
    m: int,
    epsilon: float,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    criterion: Criterion | str = Criterion.WINDOW,
    jobs: int = 1,
) -> dict[int, ApproximabilityTrace]:
    """Approximability traces of the powers T, T^2, ..., T^{n_max}."""
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")
    return {
        power: approximability_trace(
            seq,
            power_oracle(oracle, power),
            m,
            epsilon,
            budget,
            derive_seed(seed, "power", power),
            criterion,
            jobs,
        )
        for power in range(1, n_max + 1)
    }


@dataclass(frozen=True)
class DiagonalCell:
    """Projection of the level-i microstate to level j, against the level-j target."""

    i: int
    j: int
    value: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.value <= self.bound + TOLERANCE

    def to_dict(self) -> dict[str, Any]:
        return {"i": self.i, "j": self.j, "value": self.value, "bound": self.bound, "pass": self.passed}


@dataclass
class DiagonalReport:
    fits: list[DistanceCertificate]
    cells: list[DiagonalCell]

    @property
    def passed(self) -> bool:
        return all(cell.passed for cell in self.cells)

    def to_dict(self) -> dict[str, Any]:
        return {
            "levels": [
                {"level": i + 1, "fit_lower": c.lower, "fit_upper": c.upper}
                for i, c in enumerate(self.fits)
            ],
            "cells": [cell.to_dict() for cell in self.cells],
            "pass": self.passed,
        }


def diagonal_sequence(
    tower: ObservableTower,
    microstates: Sequence[Microstate],
    oracles: Sequence[CylinderOracle],
    epsilons: Sequence[float],
    m: int,
) -> DiagonalReport:
    """Check that projecting level-i microstates down the tower keeps them close.

    For each j < i the window distance between the projected empirical law
    and the level-j target must not exceed eps_i plus the level-i fit: the
    projection commutes with taking empirical laws and pushforward is
    1-Lipschitz, so any excess is the gap between the level-j target and
    the projected level-i target.

    Raises:
        ValueError: if the lists do not have one entry per level or alphabets mismatch.
    """
    levels = tower.levels
    if not len(microstates) == len(oracles) == len(epsilons) == levels:
        raise ValueError(f"Need one microstate, oracle and epsilon per level ({levels})")
    for i, (tau, oracle) in enumerate(zip(microstates, oracles), start=1):
        if tau.alphabet != tower.alphabet(i) or oracle.alphabet != tower.alphabet(i):
            raise ValueError(f"Level {i} microstate or oracle does not use the tower alphabet A_{i}")
    fits = [fit(tau, oracle, m) for tau, oracle in zip(microstates, oracles)]
    cells = []
    for i in range(2, levels + 1):
        for j in range(1, i):
            projected = project_microstate(microstates[i - 1], tower.projection(i, j))
            value = kantorovich(empirical(projected, m), oracles[j - 1].marginal(m)).value
            cells.append(
                DiagonalCell(i=i, j=j, value=value, bound=epsilons[i - 1] + fits[i - 1].value)
            )
    return DiagonalReport(fits=fits, cells=cells)


def diagonal_construction(
    tower: ObservableTower,
    oracles: Sequence[CylinderOracle],
    models: Sequence[FiniteModel],
    m: int,
    epsilons: Sequence[float] | None = None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    criterion: Criterion | str = Criterion.WINDOW,
) -> DiagonalReport:
    """Search a microstate per level, then verify them with `diagonal_sequence`.

    The default schedule is eps_i = 1/i.
    """
    if epsilons is None:
        epsilons = [1.0 / i for i in range(1, tower.levels + 1)]
    if not len(oracles) == len(models) == tower.levels:
        raise ValueError(f"Need one oracle and one model per level ({tower.levels})")
    microstates = [
        search_microstate(
            model, oracle, m, eps, budget, derive_seed(seed, "level", i), criterion
        ).microstate
        for i, (model, oracle, eps) in enumerate(zip(models, oracles, epsilons), start=1)
    ]
    return diagonal_sequence(tower, microstates, oracles, epsilons, m)


@dataclass(frozen=True)
class Witness:
    code: BlockCode
    certificate: DistanceCertificate
    evaluations: int
    exhaustive: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "code": self.code.to_dict(),
            "fit": self.certificate.to_dict(),
            "evaluations": self.evaluations,
            "exhaustive": self.exhaustive,
        }


def weak_containment_witness(
    o1: CylinderOracle,
    o2: CylinderOracle,
    m: int,
    epsilon: float,
    window: int = 1,
    budget: int = 10_000,
    criterion: Criterion | str = Criterion.WINDOW,
) -> Witness | None:
    """Look for a block code c over o2 whose factor is epsilon-close to o1 on window m.

    When |A1|^(|A2|^window) codes fit in the budget they are scanned in
    lexicographic order of their image tables; otherwise a greedy
    coordinate descent over the table runs from the constant code. None
    means no witness was found, which does not disprove weak containment.
    """
    if window < 1:
        raise ValueError(f"Code window must be positive, got {window}")
    if o1.group != o2.group:
        raise ValueError("Both oracles must live on the same group")
    source, target = o2.alphabet, o1.alphabet
    inputs = list(itertools.product(range(source.size), repeat=window))
    goal = o1.marginal(m)
    evaluations = 0

    def evaluate(table: Sequence[int]) -> tuple[BlockCode, DistanceCertificate]:
        nonlocal evaluations
        evaluations += 1
        code = BlockCode(source, target, window, dict(zip(inputs, table)))
        return code, kantorovich(BlockCodeOracle(o2, code).marginal(m), goal)

    space = target.size ** len(inputs)
    if space <= budget:
        for table in itertools.product(range(target.size), repeat=len(inputs)):
            code, cert = evaluate(table)
            if close(cert, epsilon, criterion):
                return Witness(code, cert, evaluations, exhaustive=True)
        logger.info("No witness among all %d codes of window %d", space, window)
        return None

    table = [0] * len(inputs)
    code, best = evaluate(table)
    improved = True
    while improved and not close(best, epsilon, criterion) and evaluations < budget:
        improved = False
        for slot in range(len(inputs)):
            for s in range(target.size):
                if s == table[slot] or evaluations >= budget:
                    continue
                trial = table.copy()
                trial[slot] = s
                trial_code, cert = evaluate(trial)
                if cert.value < best.value - 1e-12:
                    table, code, best, improved = trial, trial_code, cert, True
    if close(best, epsilon, criterion):
        return Witness(code, best, evaluations, exhaustive=False)
    logger.info("Greedy code search stopped at fit %.6g after %d codes", best.value, evaluations)
    return None


@dataclass(frozen=True)
class SoficWitness:
    index: int
    report: GoodnessReport
    search: SearchResult

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "goodness": self.report.to_dict(),
            "search": self.search.to_dict(include_labels=False),
        }


def sofic_witness(
    models: SoficApproximationSeq | Sequence[FiniteModel],
    oracle: CylinderOracle,
    k: int,
    m: int,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    criterion: Criterion | str = Criterion.WINDOW,
) -> SoficWitness | None:
    """The first model that is k-good and carries a microstate 1/k-close to the oracle.

    Returns None when no model of the list qualifies.
    """
    candidates = models.models if isinstance(models, SoficApproximationSeq) else list(models)
    epsilon = float(Fraction(1, k))
    for index, model in enumerate(candidates):
        report = goodness(model, k)
        if not report.passed:
            continue
        result = search_microstate(
            model, oracle, m, epsilon, budget, derive_seed(seed, "witness", index), criterion
        )
        if result.passed:
            return SoficWitness(index=index, report=report, search=result)
    return None
