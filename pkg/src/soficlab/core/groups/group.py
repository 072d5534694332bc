from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Hashable, Iterator, Literal, TypedDict

import numpy as np

Element = Hashable
"""A canonical group element: an int, a tuple of ints, or a pair of elements."""

GroupFamily = Literal["integers", "int_lattice", "free", "cyclic", "product"]

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class GroupSpec(TypedDict, total=False):
    family: GroupFamily
    dim: int
    rank: int
    order: int
    left: "GroupSpec"
    right: "GroupSpec"


class Group(ABC):
    """A countable group with a fixed enumeration of its elements.

    The enumeration is the one every window in the library refers to:
    `enumerate(k)` returns gamma_1, ..., gamma_k and gamma_1 is always the
    identity.
    """

    family: ClassVar[GroupFamily]

    @property
    @abstractmethod
    def identity(self) -> Element: ...

    @property
    def order(self) -> int | None:
        """Number of elements, or None for infinite groups."""
        return None

    @abstractmethod
    def contains(self, g: Any) -> bool:
        """Whether `g` is a canonical element of this group."""
        ...

    @abstractmethod
    def _multiply(self, g: Element, h: Element) -> Element: ...

    @abstractmethod
    def _inverse(self, g: Element) -> Element: ...

    @abstractmethod
    def iter_elements(self) -> Iterator[Element]:
        """Iterate over the elements in enumeration order."""
        ...

    @abstractmethod
    def generators(self) -> list[Element]:
        """Generating set used by the built-in models."""
        ...

    @abstractmethod
    def format(self, g: Element) -> str:
        """Serialize an element to its canonical ASCII form."""
        ...

    @abstractmethod
    def parse(self, text: str) -> Element:
        """Parse the canonical ASCII form produced by `format`."""
        ...

    @abstractmethod
    def spec(self) -> GroupSpec:
        """JSON config describing this group."""
        ...

    def check(self, g: Any) -> Element:
        """Return `g` unchanged if it belongs to the group.

        Raises:
            ValueError: if `g` is not a canonical element of this group.
        """
        if not self.contains(g):
            raise ValueError(f"{g!r} is not an element of {self}")
        return g

    def multiply(self, g: Element, h: Element) -> Element:
        """Canonical form of the product g*h.

        Raises:
            ValueError: if either argument is not an element of this group.
        """
        return self._multiply(self.check(g), self.check(h))

    def inverse(self, g: Element) -> Element:
        return self._inverse(self.check(g))

    def enumerate(self, k: int) -> list[Element]:
        """The first `k` elements of the enumeration.

        Args:
            k (int): number of elements, at least 1.

        Raises:
            ValueError: if k < 1 or k exceeds the order of a finite group.

        Returns:
            list[Element]: gamma_1, ..., gamma_k.
        """
        if k < 1:
            raise ValueError(f"Window size must be positive, got {k}")
        if self.order is not None and k > self.order:
            raise ValueError(f"{self} has only {self.order} elements, asked for {k}")
        return list(itertools.islice(self.iter_elements(), k))

    def position(self, g: Element, limit: int = 100_000) -> int:
        """0-based index of `g` in the enumeration.

        Raises:
            ValueError: if `g` is not among the first `limit` elements.
        """
        self.check(g)
        for index, element in enumerate(itertools.islice(self.iter_elements(), limit)):
            if element == g:
                return index
        raise ValueError(f"{self.format(g)!r} not found in the first {limit} elements")

    def random_element(self, rng: np.random.Generator, steps: int = 8) -> Element:
        """A random word of `steps` generators or inverses, reduced to canonical form."""
        gens = self.generators()
        g = self.identity
        for _ in range(steps):
            h = gens[int(rng.integers(len(gens)))]
            if rng.integers(2):
                h = self._inverse(h)
            g = self._multiply(g, h)
        return g


def _spiral_index(x: int) -> int:
    # 0, 1, -1, 2, -2, ... -> 0, 1, 2, 3, 4, ...
    return 2 * x - 1 if x > 0 else -2 * x


@dataclass(frozen=True)
class IntegerGroup(Group):
    """The integers, enumerated 0, 1, -1, 2, -2, ..."""

    family: ClassVar[GroupFamily] = "integers"

    @property
    def identity(self) -> int:
        return 0

    def contains(self, g: Any) -> bool:
        return isinstance(g, (int, np.integer)) and not isinstance(g, bool)

    def _multiply(self, g: int, h: int) -> int:
        return int(g) + int(h)

    def _inverse(self, g: int) -> int:
        return -int(g)

    def iter_elements(self) -> Iterator[int]:
        yield 0
        for r in itertools.count(1):
            yield r
            yield -r

    def generators(self) -> list[Element]:
        return [1]

    def format(self, g: Element) -> str:
        return str(int(self.check(g)))

    def parse(self, text: str) -> int:
        try:
            return int(text.strip())
        except ValueError:
            raise ValueError(f"Invalid integer element {text!r}") from None

    def spec(self) -> GroupSpec:
        return {"family": "integers"}

    def __str__(self) -> str:
        return "Z"


@dataclass(frozen=True)
class LatticeGroup(Group):
    """The lattice Z^dim.

    Enumerated shell by shell in the max norm; inside a shell, vectors are
    ordered lexicographically by the spiral index of each coordinate, so the
    rank-1 lattice enumerates like the integers.
    """

    dim: int
    family: ClassVar[GroupFamily] = "int_lattice"

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"Lattice rank must be positive, got {self.dim}")

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.dim

    def contains(self, g: Any) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == self.dim
            and all(isinstance(x, int) and not isinstance(x, bool) for x in g)
        )

    def _multiply(self, g: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(a + b for a, b in zip(g, h))

    def _inverse(self, g: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(-a for a in g)

    def iter_elements(self) -> Iterator[tuple[int, ...]]:
        yield self.identity
        for r in itertools.count(1):
            shell = [
                v
                for v in itertools.product(range(-r, r + 1), repeat=self.dim)
                if max(abs(x) for x in v) == r
            ]
            shell.sort(key=lambda v: tuple(_spiral_index(x) for x in v))
            yield from shell

    def generators(self) -> list[Element]:
        return [
            tuple(1 if i == k else 0 for i in range(self.dim)) for k in range(self.dim)
        ]

    def format(self, g: Element) -> str:
        return ",".join(str(x) for x in self.check(g))

    def parse(self, text: str) -> tuple[int, ...]:
        try:
            g = tuple(int(x) for x in text.split(","))
        except ValueError:
            raise ValueError(f"Invalid lattice element {text!r}") from None
        return self.check(g)

    def spec(self) -> GroupSpec:
        return {"family": "int_lattice", "dim": self.dim}

    def __str__(self) -> str:
        return f"Z^{self.dim}"


@dataclass(frozen=True)
class FreeGroup(Group):
    """The free group on `rank` generators.

    Elements are reduced words stored as tuples of nonzero ints: k+1 is the
    k-th generator and -(k+1) its inverse. Words are enumerated by length,
    then lexicographically with the letter order a < A < b < B < ...
    In ASCII the generators are a, b, c, ..., capitals are inverses and the
    identity is the empty string.
    """

    rank: int
    family: ClassVar[GroupFamily] = "free"

    def __post_init__(self) -> None:
        if not 1 <= self.rank <= len(_LETTERS):
            raise ValueError(f"Free group rank must be in [1, 26], got {self.rank}")

    @property
    def identity(self) -> tuple[int, ...]:
        return ()

    def contains(self, g: Any) -> bool:
        if not isinstance(g, tuple):
            return False
        for i, x in enumerate(g):
            if not isinstance(x, int) or isinstance(x, bool):
                return False
            if x == 0 or abs(x) > self.rank:
                return False
            if i > 0 and g[i - 1] == -x:
                return False
        return True

    def _multiply(self, g: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
        word = list(g)
        for x in h:
            if word and word[-1] == -x:
                word.pop()
            else:
                word.append(x)
        return tuple(word)

    def _inverse(self, g: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(-x for x in reversed(g))

    def _letters(self) -> list[int]:
        letters = []
        for k in range(1, self.rank + 1):
            letters.extend([k, -k])
        return letters

    def iter_elements(self) -> Iterator[tuple[int, ...]]:
        letters = self._letters()
        level: list[tuple[int, ...]] = [()]
        yield ()
        while True:
            # extending a lexicographically sorted level letter by letter keeps it sorted
            level = [
                word + (x,) for word in level for x in letters if not word or word[-1] != -x
            ]
            yield from level

    def generators(self) -> list[Element]:
        return [(k,) for k in range(1, self.rank + 1)]

    def format(self, g: Element) -> str:
        return "".join(
            _LETTERS[x - 1] if x > 0 else _LETTERS[-x - 1].upper() for x in self.check(g)
        )

    def parse(self, text: str) -> tuple[int, ...]:
        word: list[int] = []
        for ch in text.strip():
            k = _LETTERS.find(ch.lower()) + 1
            if k == 0 or k > self.rank:
                raise ValueError(f"Invalid letter {ch!r} for a free group of rank {self.rank}")
            word.append(k if ch.islower() else -k)
        # accept unreduced input, return the reduced word
        return self._multiply((), tuple(word))

    def spec(self) -> GroupSpec:
        return {"family": "free", "rank": self.rank}

    def __str__(self) -> str:
        return f"F_{self.rank}"


@dataclass(frozen=True)
class CyclicGroup(Group):
    """The finite cyclic group Z/order, elements are residues in [0, order)."""

    modulus: int
    family: ClassVar[GroupFamily] = "cyclic"

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"Cyclic group order must be positive, got {self.modulus}")

    @property
    def order(self) -> int:
        return self.modulus

    @property
    def identity(self) -> int:
        return 0

    def contains(self, g: Any) -> bool:
        return (
            isinstance(g, (int, np.integer))
            and not isinstance(g, bool)
            and 0 <= g < self.modulus
        )

    def _multiply(self, g: int, h: int) -> int:
        return (int(g) + int(h)) % self.modulus

    def _inverse(self, g: int) -> int:
        return (-int(g)) % self.modulus

    def iter_elements(self) -> Iterator[int]:
        yield from range(self.modulus)

    def generators(self) -> list[Element]:
        return [1 % self.modulus]

    def format(self, g: Element) -> str:
        return str(int(self.check(g)))

    def parse(self, text: str) -> int:
        try:
            g = int(text.strip())
        except ValueError:
            raise ValueError(f"Invalid residue {text!r}") from None
        return self.check(g)

    def spec(self) -> GroupSpec:
        return {"family": "cyclic", "order": self.modulus}

    def __str__(self) -> str:
        return f"Z/{self.modulus}"


@dataclass(frozen=True)
class ProductGroup(Group):
    """Direct product of two groups, elements are pairs.

    The enumeration walks Cantor diagonals i + j = s of the factor
    enumerations with i ascending, skipping indices past a finite factor.
    """

    left: Group
    right: Group
    family: ClassVar[GroupFamily] = "product"

    @property
    def order(self) -> int | None:
        if self.left.order is None or self.right.order is None:
            return None
        return self.left.order * self.right.order

    @property
    def identity(self) -> tuple[Element, Element]:
        return (self.left.identity, self.right.identity)

    def contains(self, g: Any) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == 2
            and self.left.contains(g[0])
            and self.right.contains(g[1])
        )

    def _multiply(self, g: tuple, h: tuple) -> tuple:
        return (self.left._multiply(g[0], h[0]), self.right._multiply(g[1], h[1]))

    def _inverse(self, g: tuple) -> tuple:
        return (self.left._inverse(g[0]), self.right._inverse(g[1]))

    def iter_elements(self) -> Iterator[tuple[Element, Element]]:
        factors = [_Prefix(self.left), _Prefix(self.right)]
        last_diagonal = None
        if self.order is not None:
            last_diagonal = self.left.order + self.right.order - 2  # type: ignore[operator]
        for s in itertools.count(0):
            if last_diagonal is not None and s > last_diagonal:
                return
            for i in range(s + 1):
                a = factors[0].get(i)
                b = factors[1].get(s - i)
                if a is None or b is None:
                    continue
                yield (a[0], b[0])

    def generators(self) -> list[Element]:
        return [(g, self.right.identity) for g in self.left.generators()] + [
            (self.left.identity, h) for h in self.right.generators()
        ]

    def format(self, g: Element) -> str:
        a, b = self.check(g)
        return f"[{self.left.format(a)}|{self.right.format(b)}]"

    def parse(self, text: str) -> tuple[Element, Element]:
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(f"Invalid product element {text!r}")
        body = text[1:-1]
        depth = 0
        for i, ch in enumerate(body):
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == "|" and depth == 0:
                return (self.left.parse(body[:i]), self.right.parse(body[i + 1 :]))
        raise ValueError(f"Invalid product element {text!r}")

    def spec(self) -> GroupSpec:
        return {"family": "product", "left": self.left.spec(), "right": self.right.spec()}

    def __str__(self) -> str:
        return f"({self.left} x {self.right})"


class _Prefix:
    """Lazily materialized prefix of a group enumeration."""

    def __init__(self, group: Group) -> None:
        self._iter = group.iter_elements()
        self._seen: list[Element] = []
        self._exhausted = False

    def get(self, i: int) -> tuple[Element] | None:
        while len(self._seen) <= i and not self._exhausted:
            try:
                self._seen.append(next(self._iter))
            except StopIteration:
                self._exhausted = True
        if i < len(self._seen):
            return (self._seen[i],)
        return None


def group_from_spec(spec: GroupSpec | dict[str, Any]) -> Group:
    """Build a group from its JSON config, e.g. {"family": "free", "rank": 2}.

    Raises:
        ValueError: if the family is unknown or a required field is missing.
    """
    family = spec.get("family")
    try:
        if family == "integers":
            return IntegerGroup()
        elif family == "int_lattice":
            return LatticeGroup(int(spec["dim"]))
        elif family == "free":
            return FreeGroup(int(spec["rank"]))
        elif family == "cyclic":
            return CyclicGroup(int(spec["order"]))
        elif family == "product":
            return ProductGroup(
                group_from_spec(spec["left"]), group_from_spec(spec["right"])
            )
    except KeyError as e:
        raise ValueError(f"Group family {family!r} requires field {e.args[0]!r}") from None
    raise ValueError(f"Unknown group family {family!r}")
