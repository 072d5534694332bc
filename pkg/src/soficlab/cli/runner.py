from __future__ import annotations

import logging
import time
from typing import Any, Callable

from soficlab import __version__
from soficlab.cli.config import Experiment
from soficlab.core.microstates import (
    approximability_trace,
    diagonal_construction,
    dq_test,
    entropy_estimate,
    fit,
    power_trace,
    product_identity_check,
    search_microstate,
    sofic_witness,
    weak_containment_witness,
)
from soficlab.core.models import goodness, sequence_goodness
from soficlab.core.transport import close, kantorovich
from soficlab.export.report import RunReport

logger = logging.getLogger(__name__)

Payload = dict[str, Any]


def _goodness(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    if exp.model is not None:
        assert cfg.k is not None
        return goodness(exp.model, cfg.k).to_dict()
    assert exp.sequence is not None and cfg.k_max is not None
    return sequence_goodness(exp.sequence, cfg.k_max).to_dict()


def _distance(exp: Experiment, jobs: int) -> Payload:
    d1, d2 = exp.distributions
    return kantorovich(d1, d2).to_dict()


def _fit(exp: Experiment, jobs: int) -> Payload:
    assert exp.microstate is not None and exp.oracle is not None and exp.config.m is not None
    certificate = fit(exp.microstate, exp.oracle, exp.config.m)
    out: Payload = {"microstate": exp.microstate.format(), "fit": certificate.to_dict()}
    if exp.config.epsilon is not None:
        out["pass"] = close(certificate, exp.config.epsilon, exp.config.criterion)
    return out


def _search(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    assert exp.model is not None and exp.oracle is not None
    assert cfg.m is not None and cfg.epsilon is not None and cfg.seed is not None
    return search_microstate(
        exp.model,
        exp.oracle,
        cfg.m,
        cfg.epsilon,
        cfg.budget_or_default,
        cfg.seed,
        cfg.criterion,
    ).to_dict()


def _entropy(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    assert exp.model is not None and exp.oracle is not None
    assert cfg.m is not None and cfg.epsilon is not None
    return entropy_estimate(
        exp.model,
        exp.oracle,
        cfg.m,
        cfg.epsilon,
        mode="montecarlo" if cfg.mode == "montecarlo" else "exact",
        samples=cfg.samples,
        seed=cfg.seed,
        criterion=cfg.criterion,
        jobs=jobs,
    ).to_dict()


def _trace(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    assert exp.sequence is not None and exp.oracle is not None
    assert cfg.m is not None and cfg.epsilon is not None and cfg.seed is not None
    return approximability_trace(
        exp.sequence,
        exp.oracle,
        cfg.m,
        cfg.epsilon,
        cfg.budget_or_default,
        cfg.seed,
        cfg.criterion,
        jobs,
    ).to_dict()


def _dq(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    assert exp.model is not None and exp.sampler is not None and exp.oracle is not None
    assert cfg.m is not None and cfg.epsilon is not None
    assert cfg.pairs is not None and cfg.seed is not None
    return dq_test(
        exp.model,
        exp.sampler,
        exp.oracle,
        cfg.m,
        cfg.epsilon,
        cfg.pairs,
        cfg.seed,
        cfg.criterion,
        jobs,
    ).to_dict()


def _product_check(exp: Experiment, jobs: int) -> Payload:
    assert exp.config.m is not None
    tau1, tau2 = exp.microstates
    return {
        "m": exp.config.m,
        "sizes": [tau1.size, tau2.size],
        "identity": product_identity_check(tau1, tau2, exp.config.m),
    }


def _witness(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    assert exp.oracle is not None and exp.source is not None
    assert cfg.m is not None and cfg.epsilon is not None
    found = weak_containment_witness(
        exp.oracle,
        exp.source,
        cfg.m,
        cfg.epsilon,
        cfg.window,
        cfg.budget_or_default,
        cfg.criterion,
    )
    return {"found": found is not None, "witness": None if found is None else found.to_dict()}


def _power(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    assert exp.sequence is not None and exp.oracle is not None
    assert cfg.n_max is not None and cfg.m is not None
    assert cfg.epsilon is not None and cfg.seed is not None
    traces = power_trace(
        exp.sequence,
        exp.oracle,
        cfg.n_max,
        cfg.m,
        cfg.epsilon,
        cfg.budget_or_default,
        cfg.seed,
        cfg.criterion,
        jobs,
    )
    return {"traces": {str(power): trace.to_dict() for power, trace in traces.items()}}


def _sofic_witness(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    assert exp.sequence is not None and exp.oracle is not None
    assert cfg.k is not None and cfg.m is not None and cfg.seed is not None
    found = sofic_witness(
        exp.sequence, exp.oracle, cfg.k, cfg.m, cfg.budget_or_default, cfg.seed, cfg.criterion
    )
    return {"found": found is not None, "witness": None if found is None else found.to_dict()}


def _diagonal(exp: Experiment, jobs: int) -> Payload:
    cfg = exp.config
    assert exp.tower is not None and exp.sequence is not None
    assert cfg.m is not None and cfg.seed is not None
    return diagonal_construction(
        exp.tower,
        exp.oracles,
        exp.sequence.models,
        cfg.m,
        cfg.epsilons,
        cfg.budget_or_default,
        cfg.seed,
        cfg.criterion,
    ).to_dict()


DISPATCH: dict[str, Callable[[Experiment, int], Payload]] = {
    "goodness": _goodness,
    "distance": _distance,
    "fit": _fit,
    "search": _search,
    "entropy": _entropy,
    "trace": _trace,
    "dq": _dq,
    "product_check": _product_check,
    "witness": _witness,
    "power": _power,
    "sofic_witness": _sofic_witness,
    "diagonal": _diagonal,
}


def run_experiment(exp: Experiment, jobs: int = 1) -> RunReport:
    """Run the op of a built experiment and wrap the payload in a report.

    The payload depends on the config only; `jobs` changes wall time, never results.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be positive, got {jobs}")
    op = exp.config.op
    logger.info(f"Running {op}")
    start = time.perf_counter()
    result = DISPATCH[op](exp, jobs)
    wall_time = time.perf_counter() - start
    logger.info(f"Finished {op} in {wall_time:.2f}s")
    return RunReport(
        op=op,
        config=exp.config.to_dict(),
        result=result,
        version=__version__,
        wall_time=wall_time,
    )
