from soficlab.core.models.goodness import (
    GoodnessReport,
    SequenceGoodness,
    SoficApproximationSeq,
    goodness,
    sequence_goodness,
)
from soficlab.core.models.model import (
    CyclicModel,
    FiniteModel,
    FreeRandomModel,
    LatticeModel,
    ModelSpec,
    ProductModel,
    TableModel,
    cyclic_model,
    free_random_model,
    lattice_model,
    model_from_spec,
    product_model,
    table_model,
)
from soficlab.core.models.permutation import Permutation, hamming, hamming_count

__all__ = [
    "CyclicModel",
    "FiniteModel",
    "FreeRandomModel",
    "GoodnessReport",
    "LatticeModel",
    "ModelSpec",
    "Permutation",
    "ProductModel",
    "SequenceGoodness",
    "SoficApproximationSeq",
    "TableModel",
    "cyclic_model",
    "free_random_model",
    "goodness",
    "hamming",
    "hamming_count",
    "lattice_model",
    "model_from_spec",
    "product_model",
    "sequence_goodness",
    "table_model",
]
