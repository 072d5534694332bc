from __future__ import annotations

import itertools
import logging
from abc import ABC, abstractmethod
from collections import defaultdict
from typing import Any, Literal, Mapping, Sequence, TypedDict

import numpy as np

from soficlab.core.groups import Element, Group, IntegerGroup
from soficlab.core.oracles.alphabet import Alphabet, Pattern, letters
from soficlab.core.oracles.block_code import BlockCode
from soficlab.core.oracles.distribution import TOLERANCE, Mass, WindowDistribution

logger = logging.getLogger(__name__)

OracleKind = Literal["bernoulli", "markov", "block_code", "product", "power"]


class OracleSpec(TypedDict, total=False):
    kind: OracleKind
    base: dict[str, float]
    alphabet: list[str]
    transition: list[list[float]]
    stationary: list[float]
    parent: "OracleSpec"
    window: int
    code: dict[str, str]
    left: "OracleSpec"
    right: "OracleSpec"
    oracle: "OracleSpec"
    n: int


class CylinderOracle(ABC):
    """A shift-invariant measure on A^G, known through its window marginals.

    `marginal_at(elements)` is the joint law of (x(g))_{g in elements};
    `marginal(m)` is the law on the first m enumerated elements and is cached
    per m as a pure cache.
    """

    kind: str

    def __init__(self, group: Group, alphabet: Alphabet) -> None:
        self._group = group
        self._alphabet = alphabet
        self._cache: dict[int, WindowDistribution] = {}

    @property
    def group(self) -> Group:
        return self._group

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @abstractmethod
    def _marginal_at(self, elements: tuple[Element, ...]) -> WindowDistribution: ...

    @abstractmethod
    def spec(self) -> OracleSpec:
        """JSON config describing this oracle."""
        ...

    def marginal_at(self, elements: Sequence[Element]) -> WindowDistribution:
        """Joint law of the coordinates at the given distinct group elements.

        Raises:
            ValueError: if the list is empty, has repeats or foreign elements.
        """
        elements = tuple(self._group.check(g) for g in elements)
        if not elements:
            raise ValueError("Need at least one element")
        if len(set(elements)) != len(elements):
            raise ValueError("Marginal elements must be distinct")
        return self._marginal_at(elements)

    def marginal(self, m: int) -> WindowDistribution:
        """Law of (x(gamma_1), ..., x(gamma_m))."""
        d = self._cache.get(m)
        if d is None:
            d = self.marginal_at(self._group.enumerate(m))
            self._cache[m] = d
        return d

    def __repr__(self) -> str:
        return f"{type(self).__name__}(group={self._group}, alphabet={list(self._alphabet)})"


class BernoulliOracle(CylinderOracle):
    """The product measure base^G."""

    kind = "bernoulli"

    def __init__(self, group: Group, alphabet: Alphabet, base: Sequence[Mass]) -> None:
        super().__init__(group, alphabet)
        if len(base) != alphabet.size:
            raise ValueError(f"Base distribution needs {alphabet.size} masses, got {len(base)}")
        if any(p < 0 for p in base):
            raise ValueError(f"Base masses must be nonnegative, got {list(base)}")
        if abs(sum(base) - 1) > TOLERANCE:
            raise ValueError(f"Base masses sum to {float(sum(base))}, expected 1")
        self._base = tuple(base)

    @property
    def base(self) -> tuple[Mass, ...]:
        return self._base

    def _marginal_at(self, elements: tuple[Element, ...]) -> WindowDistribution:
        return WindowDistribution.product(self._alphabet, len(elements), self._base)

    def spec(self) -> OracleSpec:
        return {
            "kind": "bernoulli",
            "base": {s: float(p) for s, p in zip(self._alphabet.symbols, self._base)},
        }


def stationary_distribution(transition: np.ndarray) -> np.ndarray:
    """A stationary vector pi = pi P, normalized, via least squares."""
    k = transition.shape[0]
    a = np.vstack([transition.T - np.eye(k), np.ones((1, k))])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


class MarkovOracle(CylinderOracle):
    """A stationary Markov chain indexed by the integers.

    Marginals at arbitrary positions are computed on the sorted positions,
    using matrix powers across the gaps, then read back in the requested
    order.
    """

    kind = "markov"

    def __init__(
        self,
        group: Group,
        alphabet: Alphabet,
        transition: Sequence[Sequence[float]] | np.ndarray,
        stationary: Sequence[float] | None = None,
    ) -> None:
        if not isinstance(group, IntegerGroup):
            raise ValueError(f"Markov oracles are only supported on the integers, got {group}")
        super().__init__(group, alphabet)
        p = np.asarray(transition, dtype=np.float64)
        if p.shape != (alphabet.size, alphabet.size):
            raise ValueError(
                f"Transition matrix must be {alphabet.size}x{alphabet.size}, got {p.shape}"
            )
        if (p < 0).any() or not np.allclose(p.sum(axis=1), 1.0, atol=TOLERANCE):
            raise ValueError("Transition matrix rows must be probability vectors")
        if stationary is None:
            pi = stationary_distribution(p)
        else:
            pi = np.asarray(stationary, dtype=np.float64)
            if pi.shape != (alphabet.size,) or abs(pi.sum() - 1) > TOLERANCE:
                raise ValueError("Stationary vector must be a probability vector")
        if not np.allclose(pi @ p, pi, atol=1e-8):
            raise ValueError("Vector is not stationary for the transition matrix")
        p.setflags(write=False)
        pi.setflags(write=False)
        self._transition = p
        self._stationary = pi

    @property
    def transition(self) -> np.ndarray:
        return self._transition

    @property
    def stationary(self) -> np.ndarray:
        return self._stationary

    def _marginal_at(self, elements: tuple[Element, ...]) -> WindowDistribution:
        order = sorted(range(len(elements)), key=lambda i: elements[i])
        positions = [int(elements[i]) for i in order]
        steps = [
            np.linalg.matrix_power(self._transition, b - a)
            for a, b in zip(positions, positions[1:])
        ]
        k = self._alphabet.size
        sorted_mass: dict[Pattern, float] = {}
        for pattern in itertools.product(range(k), repeat=len(positions)):
            p = float(self._stationary[pattern[0]])
            for step, (s, t) in zip(steps, zip(pattern, pattern[1:])):
                if p == 0.0:
                    break
                p *= float(step[s, t])
            if p > 0.0:
                sorted_mass[pattern] = p
        # sorted slot j holds the coordinate of elements[order[j]]
        back = [order.index(i) for i in range(len(elements))]
        mass: dict[Pattern, float] = {
            tuple(pattern[j] for j in back): p for pattern, p in sorted_mass.items()
        }
        return WindowDistribution(self._alphabet, len(elements), mass)

    def spec(self) -> OracleSpec:
        return {
            "kind": "markov",
            "alphabet": list(self._alphabet.symbols),
            "transition": self._transition.tolist(),
            "stationary": self._stationary.tolist(),
        }


class BlockCodeOracle(CylinderOracle):
    """The factor of a parent oracle through a sliding-block code.

    The factor coordinate at g reads the parent at gamma_j * g for j <= w.
    The parent is queried on exactly those elements, which gives the same law
    as pushing forward the least covering window.
    """

    kind = "block_code"

    def __init__(self, parent: CylinderOracle, code: BlockCode) -> None:
        if code.source != parent.alphabet:
            raise ValueError("Block code input alphabet does not match the parent oracle")
        super().__init__(parent.group, code.target)
        self._parent = parent
        self._code = code
        self._code_window = parent.group.enumerate(code.window)

    @property
    def parent(self) -> CylinderOracle:
        return self._parent

    @property
    def code(self) -> BlockCode:
        return self._code

    def _marginal_at(self, elements: tuple[Element, ...]) -> WindowDistribution:
        group = self._group
        needed: list[Element] = []
        slots: dict[Element, int] = {}
        reads: list[list[int]] = []
        for g in elements:
            row = []
            for h in self._code_window:
                x = group.multiply(h, g)
                if x not in slots:
                    slots[x] = len(needed)
                    needed.append(x)
                row.append(slots[x])
            reads.append(row)
        parent = self._parent.marginal_at(needed)
        mass: dict[Pattern, Mass] = defaultdict(int)
        for pattern, p in parent.mass.items():
            image = tuple(self._code(tuple(pattern[j] for j in row)) for row in reads)
            mass[image] += p
        return WindowDistribution(self._alphabet, len(elements), mass)

    def spec(self) -> OracleSpec:
        code = self._code.to_dict()
        return {
            "kind": "block_code",
            "parent": self._parent.spec(),
            "window": code["window"],
            "alphabet": code["alphabet"],
            "code": code["code"],
        }


class ProductOracle(CylinderOracle):
    """The product action: alphabet A' x A'', marginals are tensors of the factor marginals."""

    kind = "product"

    def __init__(self, left: CylinderOracle, right: CylinderOracle) -> None:
        if left.group != right.group:
            raise ValueError(f"Cannot take the product of oracles over {left.group} and {right.group}")
        super().__init__(left.group, left.alphabet.pair(right.alphabet))
        self._left = left
        self._right = right

    @property
    def left(self) -> CylinderOracle:
        return self._left

    @property
    def right(self) -> CylinderOracle:
        return self._right

    def _marginal_at(self, elements: tuple[Element, ...]) -> WindowDistribution:
        return self._left.marginal_at(elements).tensor(self._right.marginal_at(elements))

    def spec(self) -> OracleSpec:
        return {"kind": "product", "left": self._left.spec(), "right": self._right.spec()}


def bernoulli_oracle(
    group: Group, base: Mapping[str, Mass], alphabet: Alphabet | None = None
) -> BernoulliOracle:
    """Bernoulli oracle from labelled masses, e.g. {"a": 0.5, "b": 0.5}."""
    alphabet = alphabet or Alphabet(tuple(base))
    return BernoulliOracle(group, alphabet, [base.get(s, 0) for s in alphabet.symbols])


def product_oracle(o1: CylinderOracle, o2: CylinderOracle) -> ProductOracle:
    """The product of two oracles over the same group.

    Raises:
        ValueError: if the groups differ.
    """
    return ProductOracle(o1, o2)


def power_oracle(o: CylinderOracle, n: int) -> CylinderOracle:
    """The n-fold product action T^n, nested to the left: ((o x o) x o) ..."""
    if n < 1:
        raise ValueError(f"Power must be positive, got {n}")
    out = o
    for _ in range(n - 1):
        out = ProductOracle(out, o)
    return out


def consistency_gap(o: CylinderOracle, m: int) -> float:
    """Total variation between marginal(m) restricted to m-1 coordinates and marginal(m-1)."""
    if m < 2:
        raise ValueError(f"Consistency needs m >= 2, got {m}")
    return o.marginal(m).restrict(m - 1).total_variation(o.marginal(m - 1))


def oracle_from_spec(spec: OracleSpec | Mapping[str, Any], group: Group) -> CylinderOracle:
    """Build an oracle over `group` from its JSON config.

    Example usage:
        ``` py
        oracle = oracle_from_spec({"kind": "bernoulli", "base": {"a": 0.5, "b": 0.5}}, IntegerGroup())
        ```

    Raises:
        ValueError: if the kind is unknown, a field is missing or the
            combination is unsupported (e.g. markov on a free group).
    """
    kind = spec.get("kind")

    def field(name: str) -> Any:
        if name not in spec:
            raise ValueError(f"Oracle kind {kind!r} requires field {name!r}")
        return spec[name]

    if kind == "bernoulli":
        return bernoulli_oracle(group, field("base"))
    elif kind == "markov":
        transition = field("transition")
        if "alphabet" in spec:
            alphabet = Alphabet.of(spec["alphabet"])
        else:
            alphabet = letters(len(transition))
        return MarkovOracle(group, alphabet, transition, spec.get("stationary"))
    elif kind == "block_code":
        parent = oracle_from_spec(field("parent"), group)
        target = Alphabet.of(spec["alphabet"]) if "alphabet" in spec else None
        code = BlockCode.from_dict(parent.alphabet, int(field("window")), field("code"), target)
        return BlockCodeOracle(parent, code)
    elif kind == "product":
        return ProductOracle(
            oracle_from_spec(field("left"), group), oracle_from_spec(field("right"), group)
        )
    elif kind == "power":
        return power_oracle(oracle_from_spec(field("oracle"), group), int(field("n")))
    raise ValueError(f"Unknown oracle kind {kind!r}")
