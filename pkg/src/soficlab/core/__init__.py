from soficlab.core.groups import (
    CyclicGroup,
    FreeGroup,
    Group,
    IntegerGroup,
    LatticeGroup,
    ProductGroup,
    group_from_spec,
)
from soficlab.core.microstates import (
    Microstate,
    approximability_trace,
    dq_test,
    empirical,
    entropy_estimate,
    fit,
    search_microstate,
)
from soficlab.core.models import (
    FiniteModel,
    SoficApproximationSeq,
    cyclic_model,
    free_random_model,
    goodness,
    lattice_model,
    model_from_spec,
    product_model,
)
from soficlab.core.oracles import (
    Alphabet,
    CylinderOracle,
    WindowDistribution,
    bernoulli_oracle,
    oracle_from_spec,
)
from soficlab.core.transport import kantorovich

__all__ = [
    "Alphabet",
    "CyclicGroup",
    "CylinderOracle",
    "FiniteModel",
    "FreeGroup",
    "Group",
    "IntegerGroup",
    "LatticeGroup",
    "Microstate",
    "ProductGroup",
    "SoficApproximationSeq",
    "WindowDistribution",
    "approximability_trace",
    "bernoulli_oracle",
    "cyclic_model",
    "dq_test",
    "empirical",
    "entropy_estimate",
    "fit",
    "free_random_model",
    "goodness",
    "group_from_spec",
    "kantorovich",
    "lattice_model",
    "model_from_spec",
    "oracle_from_spec",
    "product_model",
    "search_microstate",
]
