from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Literal, Mapping, TypedDict

import numpy as np

from soficlab.core.groups import (
    CyclicGroup,
    Element,
    FreeGroup,
    Group,
    IntegerGroup,
    LatticeGroup,
    group_from_spec,
)
from soficlab.core.groups.group import GroupSpec
from soficlab.core.models.permutation import Permutation

logger = logging.getLogger(__name__)

ModelKind = Literal["cyclic", "lattice", "free_random", "product", "table"]


class ModelSpec(TypedDict, total=False):
    kind: ModelKind
    n: int
    dim: int
    side: int
    rank: int
    seed: int
    left: "ModelSpec"
    right: "ModelSpec"
    group: GroupSpec
    perms: dict[str, list[int]]


class FiniteModel(ABC):
    """A map sigma: G -> Sym(V) on V = {0, ..., size-1}.

    The map is evaluated lazily and memoized per canonical element. The memo
    is a pure cache: concurrent evaluations may duplicate work but always
    store equal permutations.
    """

    kind: ClassVar[ModelKind]

    def __init__(self, group: Group, size: int) -> None:
        if size < 1:
            raise ValueError(f"Model size must be positive, got {size}")
        self._group = group
        self._size = size
        self._memo: dict[Element, Permutation] = {}
        self._orbits: dict[int, np.ndarray] = {}

    @property
    def group(self) -> Group:
        return self._group

    @property
    def size(self) -> int:
        return self._size

    @abstractmethod
    def _evaluate(self, g: Element) -> Permutation: ...

    @abstractmethod
    def spec(self) -> ModelSpec:
        """JSON config describing this model."""
        ...

    def evaluate(self, g: Element) -> Permutation:
        """The permutation sigma^g.

        Raises:
            ValueError: if `g` is not an element of the model's group.
        """
        self._group.check(g)
        perm = self._memo.get(g)
        if perm is None:
            perm = self._evaluate(g)
            self._memo[g] = perm
        return perm

    def orbit_matrix(self, m: int) -> np.ndarray:
        """Read-only (size, m) array with entry [v, i] = sigma^{gamma_{i+1}}(v)."""
        orbits = self._orbits.get(m)
        if orbits is None:
            elements = self._group.enumerate(m)
            orbits = np.stack([self.evaluate(g).image for g in elements], axis=1)
            orbits.setflags(write=False)
            self._orbits[m] = orbits
        return orbits

    def __repr__(self) -> str:
        return f"{type(self).__name__}(group={self._group}, size={self._size})"


class CyclicModel(FiniteModel):
    """Rotations of Z/n.

    On the integers, g acts by v -> v + g mod n. On a finite cyclic group
    Z/q with q dividing n, g acts by v -> v + g*(n/q) mod n, which keeps the
    action free and exactly multiplicative.
    """

    kind: ClassVar[ModelKind] = "cyclic"

    def __init__(self, n: int, group: Group | None = None) -> None:
        group = group or IntegerGroup()
        super().__init__(group, n)
        if isinstance(group, IntegerGroup):
            self._step = 1
        elif isinstance(group, CyclicGroup):
            if n % group.modulus != 0:
                raise ValueError(
                    f"Cyclic model of size {n} needs the group order {group.modulus} to divide it"
                )
            self._step = n // group.modulus
        else:
            raise ValueError(f"Cyclic models act by the integers or Z/q, got {group}")

    def _evaluate(self, g: Element) -> Permutation:
        shift = (int(g) * self._step) % self.size
        return Permutation((np.arange(self.size) + shift) % self.size, check=False)

    def spec(self) -> ModelSpec:
        spec: ModelSpec = {"kind": "cyclic", "n": self.size}
        if not isinstance(self.group, IntegerGroup):
            spec["group"] = self.group.spec()
        return spec


class LatticeModel(FiniteModel):
    """Coordinate rotations of the torus grid (Z/side)^dim, indexed row-major."""

    kind: ClassVar[ModelKind] = "lattice"

    def __init__(self, dim: int, side: int) -> None:
        if side < 1:
            raise ValueError(f"Lattice side must be positive, got {side}")
        super().__init__(LatticeGroup(dim), side**dim)
        self._side = side
        self._shape = (side,) * dim
        self._coords = np.indices(self._shape).reshape(dim, -1)

    @property
    def side(self) -> int:
        return self._side

    def _evaluate(self, g: Element) -> Permutation:
        shift = np.asarray(g, dtype=np.int64)[:, None]
        moved = (self._coords + shift) % self._side
        return Permutation(np.ravel_multi_index(tuple(moved), self._shape), check=False)

    def spec(self) -> ModelSpec:
        assert isinstance(self.group, LatticeGroup)
        return {"kind": "lattice", "dim": self.group.dim, "side": self._side}


class FreeRandomModel(FiniteModel):
    """Independent uniform generator permutations extended to the free group.

    Words are evaluated by composition, sigma^{xw} = sigma^x o sigma^w, so the
    map is an exact homomorphism; randomness only enters the generators.
    """

    kind: ClassVar[ModelKind] = "free_random"

    def __init__(self, rank: int, n: int, seed: int) -> None:
        super().__init__(FreeGroup(rank), n)
        self._seed = seed
        rng = np.random.default_rng(seed)
        self._letters: dict[int, Permutation] = {}
        for k in range(1, rank + 1):
            perm = Permutation.random(n, rng)
            self._letters[k] = perm
            self._letters[-k] = perm.inverse()

    @property
    def seed(self) -> int:
        return self._seed

    def _evaluate(self, g: Element) -> Permutation:
        word: tuple[int, ...] = g  # type: ignore[assignment]
        image = np.arange(self.size)
        for letter in reversed(word):
            image = self._letters[letter].image[image]
        return Permutation(image, check=False)

    def spec(self) -> ModelSpec:
        assert isinstance(self.group, FreeGroup)
        return {"kind": "free_random", "rank": self.group.rank, "n": self.size, "seed": self._seed}


class ProductModel(FiniteModel):
    """The componentwise action on V' x V'', indexed row-major: (v', v'') -> v'*|V''| + v''."""

    kind: ClassVar[ModelKind] = "product"

    def __init__(self, left: FiniteModel, right: FiniteModel) -> None:
        if left.group != right.group:
            raise ValueError(f"Cannot take the product of models of {left.group} and {right.group}")
        super().__init__(left.group, left.size * right.size)
        self._left = left
        self._right = right

    @property
    def left(self) -> FiniteModel:
        return self._left

    @property
    def right(self) -> FiniteModel:
        return self._right

    def _evaluate(self, g: Element) -> Permutation:
        a = self._left.evaluate(g).image
        b = self._right.evaluate(g).image
        image = (a[:, None] * self._right.size + b[None, :]).ravel()
        return Permutation(image, check=False)

    def spec(self) -> ModelSpec:
        return {"kind": "product", "left": self._left.spec(), "right": self._right.spec()}


class TableModel(FiniteModel):
    """An explicit table of permutations; elements missing from the table act as the identity.

    Nothing forces a table to be multiplicative or to fix the identity, which
    is what adversarial tests need.
    """

    kind: ClassVar[ModelKind] = "table"

    def __init__(self, group: Group, size: int, perms: Mapping[Element, Permutation]) -> None:
        super().__init__(group, size)
        table: dict[Element, Permutation] = {}
        for g, perm in perms.items():
            group.check(g)
            if perm.size != size:
                raise ValueError(
                    f"Table entry for {group.format(g)!r} has size {perm.size}, expected {size}"
                )
            table[g] = perm
        self._table = table

    def _evaluate(self, g: Element) -> Permutation:
        return self._table.get(g) or Permutation.identity(self.size)

    def spec(self) -> ModelSpec:
        return {
            "kind": "table",
            "group": self.group.spec(),
            "n": self.size,
            "perms": {self.group.format(g): p.tolist() for g, p in self._table.items()},
        }


def cyclic_model(n: int, group: Group | None = None) -> CyclicModel:
    return CyclicModel(n, group)


def lattice_model(dim: int, side: int) -> LatticeModel:
    return LatticeModel(dim, side)


def free_random_model(rank: int, n: int, seed: int) -> FreeRandomModel:
    return FreeRandomModel(rank, n, seed)


def product_model(m1: FiniteModel, m2: FiniteModel) -> ProductModel:
    """Product of two models of the same group.

    Raises:
        ValueError: if the models act by different groups.
    """
    return ProductModel(m1, m2)


def table_model(
    group: Group, size: int, perms: Mapping[Element, Permutation] | None = None
) -> TableModel:
    return TableModel(group, size, perms or {})


def model_from_spec(spec: ModelSpec | dict[str, Any], group: Group | None = None) -> FiniteModel:
    """Build a model from its JSON config.

    Example usage:
        ``` py
        model = model_from_spec({"kind": "free_random", "rank": 2, "n": 500, "seed": 7})
        ```

    Args:
        spec (ModelSpec): the model config.
        group (Group | None, optional): group used when the config has no
            "group" field (table and cyclic kinds). Defaults to None.

    Raises:
        ValueError: if the kind is unknown, a field is missing or invalid.

    Returns:
        FiniteModel: the model.
    """
    kind = spec.get("kind")
    if "group" in spec:
        group = group_from_spec(spec["group"])
    try:
        if kind == "cyclic":
            return CyclicModel(int(spec["n"]), group)
        elif kind == "lattice":
            return LatticeModel(int(spec["dim"]), int(spec["side"]))
        elif kind == "free_random":
            return FreeRandomModel(int(spec["rank"]), int(spec["n"]), int(spec["seed"]))
        elif kind == "product":
            return ProductModel(
                model_from_spec(spec["left"], group), model_from_spec(spec["right"], group)
            )
        elif kind == "table":
            if group is None:
                raise ValueError("Table models need a group")
            perms = {group.parse(key): Permutation(image) for key, image in spec["perms"].items()}
            if "n" in spec:
                size = int(spec["n"])
            elif perms:
                size = next(iter(perms.values())).size
            else:
                raise ValueError("Empty table models need an explicit size 'n'")
            return TableModel(group, size, perms)
    except KeyError as e:
        raise ValueError(f"Model kind {kind!r} requires field {e.args[0]!r}") from None
    raise ValueError(f"Unknown model kind {kind!r}")
