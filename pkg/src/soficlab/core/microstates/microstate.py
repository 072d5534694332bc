from __future__ import annotations

from typing import Any, NamedTuple, Sequence

import numpy as np

from soficlab.core.microstates.counting import PatternCodec
from soficlab.core.models import FiniteModel, product_model
from soficlab.core.oracles import (
    TOLERANCE,
    Alphabet,
    CylinderOracle,
    SymbolMap,
    WindowDistribution,
)
from soficlab.core.transport import DistanceCertificate, kantorovich


class Microstate:
    """A labeling tau: V -> A of a finite model's vertex set.

    Labels are stored as a read-only array of symbol indices.

    Example usage:
        ``` py
        tau = Microstate.from_symbols(cyclic_model(4), Alphabet.of("ab"), "abab")
        empirical(tau, 2)  # {ab: 1/2, ba: 1/2}
        ```
    """

    __slots__ = ("_model", "_alphabet", "_labels")

    def __init__(self, model: FiniteModel, alphabet: Alphabet, labels: Sequence[int] | np.ndarray) -> None:
        arr = np.array(labels, dtype=np.int64)
        if arr.shape != (model.size,):
            raise ValueError(f"Labeling has shape {arr.shape}, the model has {model.size} vertices")
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet.size):
            raise ValueError("Labeling uses symbols outside the alphabet")
        arr.setflags(write=False)
        self._model = model
        self._alphabet = alphabet
        self._labels = arr

    @classmethod
    def from_symbols(
        cls, model: FiniteModel, alphabet: Alphabet, symbols: Sequence[str] | str
    ) -> Microstate:
        return cls(model, alphabet, alphabet.encode(symbols))

    @classmethod
    def constant(cls, model: FiniteModel, alphabet: Alphabet, symbol: str) -> Microstate:
        return cls(model, alphabet, np.full(model.size, alphabet.index(symbol)))

    @property
    def model(self) -> FiniteModel:
        return self._model

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def size(self) -> int:
        return int(self._labels.size)

    def symbols(self) -> list[str]:
        return self._alphabet.decode(self._labels)

    def format(self) -> str:
        return self._alphabet.format_pattern(self._labels.tolist())

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Microstate):
            return NotImplemented
        return (
            self._model is other._model
            and self._alphabet == other._alphabet
            and bool(np.array_equal(self._labels, other._labels))
        )

    def __hash__(self) -> int:
        return hash((id(self._model), self._alphabet, self._labels.tobytes()))

    def __repr__(self) -> str:
        shown = self.format() if self.size <= 24 else f"<{self.size} labels>"
        return f"Microstate({shown})"


def theta(tau: Microstate, v: int, m: int) -> tuple[str, ...]:
    """The pattern seen from vertex v: (tau(sigma^{gamma_1} v), ..., tau(sigma^{gamma_m} v))."""
    if not 0 <= v < tau.size:
        raise ValueError(f"Vertex {v} outside 0..{tau.size - 1}")
    row = tau.model.orbit_matrix(m)[v]
    return tuple(tau.alphabet.decode(tau.labels[row]))


def empirical(tau: Microstate, m: int) -> WindowDistribution:
    """The uniform average over v of the Dirac mass at theta(tau, v, m), with exact masses."""
    codec = PatternCodec(tau.alphabet.size, m)
    codes = codec.encode(tau.labels[tau.model.orbit_matrix(m)])
    unique, counts = np.unique(codes, return_counts=True)
    patterns = [tuple(row) for row in codec.decode(unique).tolist()]
    return WindowDistribution.from_counts(
        tau.alphabet, m, dict(zip(patterns, counts.tolist()))
    )


def fit(tau: Microstate, oracle: CylinderOracle, m: int) -> DistanceCertificate:
    """Kantorovich distance between the empirical law of tau and the oracle's window marginal.

    Raises:
        ValueError: if the alphabets or groups differ.
    """
    if tau.alphabet != oracle.alphabet:
        raise ValueError(
            f"Microstate alphabet {list(tau.alphabet)} differs from oracle alphabet {list(oracle.alphabet)}"
        )
    if tau.model.group != oracle.group:
        raise ValueError(f"Model acts by {tau.model.group}, oracle lives on {oracle.group}")
    return kantorovich(empirical(tau, m), oracle.marginal(m))


def tensor_microstate(
    tau1: Microstate, tau2: Microstate, model: FiniteModel | None = None
) -> Microstate:
    """(v', v'') -> (tau1(v'), tau2(v'')) on the product model, row-major.

    Args:
        tau1 (Microstate): labeling of the first factor.
        tau2 (Microstate): labeling of the second factor.
        model (FiniteModel | None, optional): model to attach the labeling to,
            by default the product of the factor models.
    """
    if model is None:
        model = product_model(tau1.model, tau2.model)
    elif model.size != tau1.size * tau2.size:
        raise ValueError(f"Model has {model.size} vertices, expected {tau1.size * tau2.size}")
    labels = (tau1.labels[:, None] * tau2.alphabet.size + tau2.labels[None, :]).ravel()
    return Microstate(model, tau1.alphabet.pair(tau2.alphabet), labels)


def product_identity_check(
    tau1: Microstate, tau2: Microstate, m: int, joint_model: FiniteModel | None = None
) -> bool:
    """Whether the empirical law of the tensor microstate is the tensor of the factor empiricals.

    The comparison is between exact rational masses. On the product model
    this always holds; passing a different `joint_model` of the right size
    tests whether that model behaves like a product.
    """
    if tau1.model.group != tau2.model.group:
        raise ValueError("Factor models act by different groups")
    joint = empirical(tensor_microstate(tau1, tau2, joint_model), m)
    return joint == empirical(tau1, m).tensor(empirical(tau2, m))


def project_microstate(tau: Microstate, symbol_map: SymbolMap) -> Microstate:
    """Apply a symbol map vertex by vertex.

    Raises:
        ValueError: if the map is not defined on the microstate's alphabet.
    """
    if symbol_map.source != tau.alphabet:
        raise ValueError(
            f"Symbol map is defined on {list(symbol_map.source)}, microstate uses {list(tau.alphabet)}"
        )
    return Microstate(tau.model, symbol_map.target, symbol_map.apply_labels(tau.labels))


def disagreement(tau1: Microstate, tau2: Microstate) -> int:
    """Number of vertices where two labelings differ."""
    if tau1.size != tau2.size:
        raise ValueError(f"Labelings have different sizes: {tau1.size} != {tau2.size}")
    return int(np.count_nonzero(tau1.labels != tau2.labels))


def microstate_distance(tau1: Microstate, tau2: Microstate) -> float:
    """sup_v d(tau1(v), tau2(v)) for the discrete metric on A."""
    return 1.0 if disagreement(tau1, tau2) else 0.0


class PerturbationCheck(NamedTuple):
    distance: float
    bound: float
    disagreement: int

    @property
    def holds(self) -> bool:
        return self.distance <= self.bound + TOLERANCE


def perturbation_bound(tau1: Microstate, tau2: Microstate, m: int) -> PerturbationCheck:
    """Window distance between two empirical laws against m*d/|V|, d the disagreement count.

    Each changed vertex enters at most m window patterns because every
    sigma^{gamma_i} is a bijection.
    """
    if tau1.model is not tau2.model:
        raise ValueError("Both labelings must live on the same model")
    d = disagreement(tau1, tau2)
    distance = kantorovich(empirical(tau1, m), empirical(tau2, m)).value
    return PerturbationCheck(distance=distance, bound=m * d / tau1.size, disagreement=d)
