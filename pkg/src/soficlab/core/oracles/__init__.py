from soficlab.core.oracles.alphabet import Alphabet, Pattern, SymbolMap, letters
from soficlab.core.oracles.block_code import BlockCode, code_disagreement
from soficlab.core.oracles.distribution import TOLERANCE, WindowDistribution, average
from soficlab.core.oracles.oracle import (
    BernoulliOracle,
    BlockCodeOracle,
    CylinderOracle,
    MarkovOracle,
    OracleSpec,
    ProductOracle,
    bernoulli_oracle,
    consistency_gap,
    oracle_from_spec,
    power_oracle,
    product_oracle,
    stationary_distribution,
)
from soficlab.core.oracles.tower import ObservableTower, product_tower, tower_project

__all__ = [
    "Alphabet",
    "BernoulliOracle",
    "BlockCode",
    "BlockCodeOracle",
    "CylinderOracle",
    "MarkovOracle",
    "ObservableTower",
    "OracleSpec",
    "Pattern",
    "ProductOracle",
    "SymbolMap",
    "TOLERANCE",
    "WindowDistribution",
    "average",
    "bernoulli_oracle",
    "code_disagreement",
    "consistency_gap",
    "letters",
    "oracle_from_spec",
    "power_oracle",
    "product_oracle",
    "product_tower",
    "stationary_distribution",
    "tower_project",
]
