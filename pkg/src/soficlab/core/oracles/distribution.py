from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction
from numbers import Real
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from soficlab.core.oracles.alphabet import Alphabet, Pattern, SymbolMap

TOLERANCE = 1e-9
"""Numeric tolerance for probability normalization and closeness tests."""

Mass = Fraction | float


class WindowDistribution:
    """A probability distribution on patterns A^{W_m}, W_m the first m enumerated elements.

    Patterns are tuples of symbol indices. Masses are either all exact
    (`Fraction`) or floats; zero masses are dropped and the support is kept
    sorted lexicographically by symbol index, so iteration order is
    reproducible.

    Example usage:
        ``` py
        ab = Alphabet.of("ab")
        d = WindowDistribution.from_dict({"m": 2, "mass": {"ab": 0.5, "ba": 0.5}}, ab)
        d.restrict(1)  # uniform on {a, b}
        ```
    """

    __slots__ = ("_alphabet", "_m", "_mass")

    def __init__(
        self,
        alphabet: Alphabet,
        m: int,
        mass: Mapping[Pattern, Mass],
        normalize: bool = False,
    ) -> None:
        """Initialize the distribution.

        Args:
            alphabet (Alphabet): symbols of every coordinate.
            m (int): window size, at least 1.
            mass (Mapping[Pattern, Mass]): pattern masses.
            normalize (bool, optional): rescale masses to sum to 1. Defaults to False.

        Raises:
            ValueError: if a pattern has the wrong length or an unknown symbol,
                a mass is negative, or the masses do not sum to 1 within
                TOLERANCE.
        """
        if m < 1:
            raise ValueError(f"Window size must be positive, got {m}")
        cleaned: dict[Pattern, Mass] = {}
        for pattern, p in mass.items():
            pattern = tuple(int(s) for s in pattern)
            if len(pattern) != m:
                raise ValueError(f"Pattern {pattern} does not have length {m}")
            if any(not 0 <= s < alphabet.size for s in pattern):
                raise ValueError(f"Pattern {pattern} has symbols outside the alphabet")
            if p < -TOLERANCE:
                raise ValueError(f"Negative mass {p} on pattern {pattern}")
            if p > 0:
                cleaned[pattern] = cleaned.get(pattern, 0) + p
        total = sum(cleaned.values())
        if normalize:
            if total <= 0:
                raise ValueError("Cannot normalize a distribution with no mass")
            cleaned = {k: v / total for k, v in cleaned.items()}
        elif abs(total - 1) > TOLERANCE:
            raise ValueError(f"Masses sum to {float(total)}, expected 1")
        self._alphabet = alphabet
        self._m = m
        self._mass = dict(sorted(cleaned.items()))

    @classmethod
    def dirac(cls, alphabet: Alphabet, pattern: Sequence[int]) -> WindowDistribution:
        return cls(alphabet, len(pattern), {tuple(pattern): Fraction(1)})

    @classmethod
    def from_counts(
        cls, alphabet: Alphabet, m: int, counts: Mapping[Pattern, int]
    ) -> WindowDistribution:
        """Exact distribution with masses count/total."""
        total = sum(counts.values())
        if total <= 0:
            raise ValueError("Counts must have a positive total")
        return cls(alphabet, m, {k: Fraction(int(c), total) for k, c in counts.items()})

    @classmethod
    def product(
        cls, alphabet: Alphabet, m: int, base: Sequence[Mass]
    ) -> WindowDistribution:
        """The i.i.d. distribution with one-coordinate law `base`."""
        support = [s for s, p in enumerate(base) if p > 0]
        mass = {}
        for pattern in itertools.product(support, repeat=m):
            p: Mass = 1
            for s in pattern:
                p = p * base[s]
            mass[pattern] = p
        return cls(alphabet, m, mass)

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def m(self) -> int:
        return self._m

    @property
    def mass(self) -> dict[Pattern, Mass]:
        return dict(self._mass)

    @property
    def exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self._mass.values())

    def support(self) -> list[Pattern]:
        return list(self._mass)

    def patterns_array(self) -> np.ndarray:
        """Support as an (N, m) int array, in support order."""
        return np.array(list(self._mass), dtype=np.int64).reshape(len(self._mass), self._m)

    def weights(self) -> np.ndarray:
        return np.array([float(p) for p in self._mass.values()], dtype=np.float64)

    def get(self, pattern: Sequence[int]) -> Mass:
        return self._mass.get(tuple(pattern), 0)

    def __len__(self) -> int:
        return len(self._mass)

    def _check_compatible(self, other: WindowDistribution) -> None:
        if self._m != other._m:
            raise ValueError(f"Window sizes differ: {self._m} != {other._m}")
        if self._alphabet != other._alphabet:
            raise ValueError(
                f"Alphabets differ: {list(self._alphabet)} != {list(other._alphabet)}"
            )

    def select(self, positions: Sequence[int]) -> WindowDistribution:
        """Marginal of the coordinates at `positions` (0-based), in that order."""
        out: dict[Pattern, Mass] = defaultdict(int)
        for pattern, p in self._mass.items():
            out[tuple(pattern[i] for i in positions)] += p
        return WindowDistribution(self._alphabet, len(positions), out)

    def restrict(self, m: int) -> WindowDistribution:
        """Marginal of the first m coordinates.

        Raises:
            ValueError: if m is not in [1, self.m].
        """
        if not 1 <= m <= self._m:
            raise ValueError(f"Cannot restrict a window of size {self._m} to {m}")
        return self.select(range(m))

    def pushforward(self, symbol_map: SymbolMap) -> WindowDistribution:
        """Apply a symbol map coordinatewise and add up the masses."""
        if symbol_map.source != self._alphabet:
            raise ValueError("Symbol map source does not match the distribution's alphabet")
        out: dict[Pattern, Mass] = defaultdict(int)
        for pattern, p in self._mass.items():
            out[symbol_map.apply_pattern(pattern)] += p
        return WindowDistribution(symbol_map.target, self._m, out)

    def tensor(self, other: WindowDistribution) -> WindowDistribution:
        """The product law on paired patterns, coordinate i pairing (s_i, t_i)."""
        if self._m != other._m:
            raise ValueError(f"Window sizes differ: {self._m} != {other._m}")
        alphabet = self._alphabet.pair(other._alphabet)
        width = other._alphabet.size
        mass = {}
        for s, p in self._mass.items():
            for t, q in other._mass.items():
                mass[tuple(a * width + b for a, b in zip(s, t))] = p * q
        return WindowDistribution(alphabet, self._m, mass)

    def unpair(self) -> tuple[WindowDistribution, WindowDistribution]:
        """The two factor marginals of a distribution on a product alphabet."""
        left, right = self._alphabet.split()
        width = right.size
        lmass: dict[Pattern, Mass] = defaultdict(int)
        rmass: dict[Pattern, Mass] = defaultdict(int)
        for pattern, p in self._mass.items():
            lmass[tuple(s // width for s in pattern)] += p
            rmass[tuple(s % width for s in pattern)] += p
        return (
            WindowDistribution(left, self._m, lmass),
            WindowDistribution(right, self._m, rmass),
        )

    def total_variation(self, other: WindowDistribution) -> float:
        self._check_compatible(other)
        keys = set(self._mass) | set(other._mass)
        return 0.5 * math.fsum(abs(float(self.get(k)) - float(other.get(k))) for k in keys)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, WindowDistribution):
            return NotImplemented
        return (
            self._m == other._m
            and self._alphabet == other._alphabet
            and self._mass == other._mass
        )

    def isclose(self, other: WindowDistribution, tol: float = TOLERANCE) -> bool:
        return self.total_variation(other) <= tol

    def __repr__(self) -> str:
        items = ", ".join(
            f"{self._alphabet.format_pattern(k)}: {float(v):.6g}"
            for k, v in itertools.islice(self._mass.items(), 8)
        )
        more = ", ..." if len(self._mass) > 8 else ""
        return f"WindowDistribution(m={self._m}, {{{items}{more}}})"

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self._m,
            "alphabet": list(self._alphabet.symbols),
            "mass": {self._alphabet.format_pattern(k): float(v) for k, v in self._mass.items()},
        }

    @classmethod
    def from_dict(
        cls, data: Mapping[str, Any], alphabet: Alphabet | None = None
    ) -> WindowDistribution:
        """Parse {"m": 2, "mass": {"ab": 0.25, ...}}, with an optional "alphabet" list."""
        if alphabet is None:
            if "alphabet" not in data:
                raise ValueError("Distribution needs an alphabet")
            alphabet = Alphabet.of(data["alphabet"])
        m = int(data["m"])
        mass: dict[Pattern, Mass] = {}
        for text, p in data["mass"].items():
            if not isinstance(p, Real):
                raise ValueError(f"Mass of {text!r} is not a number: {p!r}")
            mass[alphabet.parse_pattern(text)] = p
        return cls(alphabet, m, mass)

    @staticmethod
    def shared_alphabet(specs: Iterable[Mapping[str, Any]]) -> Alphabet:
        """The sorted one-character symbols used by the mass keys of all specs.

        Raises:
            ValueError: if a key is comma-separated, which needs an explicit alphabet.
        """
        symbols: set[str] = set()
        for spec in specs:
            for text in spec["mass"]:
                if "," in text:
                    raise ValueError(
                        f"Pattern {text!r} is comma-separated; give an explicit alphabet"
                    )
                symbols.update(text)
        if not symbols:
            raise ValueError("Distributions carry no mass")
        return Alphabet.of(sorted(symbols))


def average(
    distributions: Iterable[WindowDistribution], weights: Sequence[Mass] | None = None
) -> WindowDistribution:
    """Mixture of distributions sharing alphabet and window, uniform unless weighted."""
    dists = list(distributions)
    if not dists:
        raise ValueError("Cannot average an empty list of distributions")
    if weights is None:
        weights = [Fraction(1, len(dists))] * len(dists)
    if len(weights) != len(dists):
        raise ValueError("Need one weight per distribution")
    out: dict[Pattern, Mass] = defaultdict(int)
    for d, w in zip(dists, weights):
        dists[0]._check_compatible(d)
        for k, p in d._mass.items():
            out[k] += w * p
    return WindowDistribution(dists[0].alphabet, dists[0].m, out)
