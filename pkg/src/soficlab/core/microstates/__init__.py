from soficlab.core.microstates.approximability import (
    ApproximabilityTrace,
    DiagonalCell,
    DiagonalReport,
    SoficWitness,
    TraceRow,
    Witness,
    approximability_trace,
    diagonal_construction,
    diagonal_sequence,
    power_trace,
    sofic_witness,
    weak_containment_witness,
)
from soficlab.core.microstates.counting import FitKernel, PatternCodec
from soficlab.core.microstates.entropy import EntropyEstimate, entropy_estimate
from soficlab.core.microstates.microstate import (
    Microstate,
    PerturbationCheck,
    disagreement,
    empirical,
    fit,
    microstate_distance,
    perturbation_bound,
    product_identity_check,
    project_microstate,
    tensor_microstate,
    theta,
)
from soficlab.core.microstates.quenched import (
    DQReport,
    ExplicitSampler,
    IidSampler,
    MicrostateSampler,
    dq_test,
    sampler_from_spec,
)
from soficlab.core.microstates.search import DEFAULT_BUDGET, SearchResult, search_microstate

__all__ = [
    "ApproximabilityTrace",
    "DEFAULT_BUDGET",
    "DQReport",
    "DiagonalCell",
    "DiagonalReport",
    "EntropyEstimate",
    "ExplicitSampler",
    "FitKernel",
    "IidSampler",
    "Microstate",
    "MicrostateSampler",
    "PatternCodec",
    "PerturbationCheck",
    "SearchResult",
    "SoficWitness",
    "TraceRow",
    "Witness",
    "approximability_trace",
    "diagonal_construction",
    "diagonal_sequence",
    "disagreement",
    "dq_test",
    "empirical",
    "entropy_estimate",
    "fit",
    "microstate_distance",
    "perturbation_bound",
    "power_trace",
    "product_identity_check",
    "project_microstate",
    "sampler_from_spec",
    "search_microstate",
    "sofic_witness",
    "tensor_microstate",
    "theta",
    "weak_containment_witness",
]
