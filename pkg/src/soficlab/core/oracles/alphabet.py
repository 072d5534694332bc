from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

Pattern = tuple[int, ...]
"""A window pattern stored as symbol indices into its alphabet."""

PAIR_SEPARATOR = ":"


@dataclass(frozen=True)
class Alphabet:
    """An ordered, finite set of symbol labels.

    Labels are nonempty strings without commas. Patterns over an alphabet of
    single-character labels serialize by concatenation ("abba"); otherwise the
    labels are comma-joined ("a:x,b:y").

    A product alphabet remembers its two factors: the symbol at index
    i*|right| + j is the pair (left[i], right[j]), labelled "left:right".
    """

    symbols: tuple[str, ...]
    factors: tuple[Alphabet, Alphabet] | None = field(default=None, compare=True)

    def __post_init__(self) -> None:
        if not self.symbols:
            raise ValueError("An alphabet needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"Alphabet symbols must be distinct, got {list(self.symbols)}")
        for s in self.symbols:
            if not isinstance(s, str) or not s or "," in s:
                raise ValueError(f"Invalid symbol label {s!r}")

    @classmethod
    def of(cls, symbols: Sequence[str] | str) -> Alphabet:
        """Alphabet from a list of labels, or from a string of one-character labels."""
        return cls(tuple(symbols))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    @property
    def _index(self) -> dict[str, int]:
        # frozen dataclass: build lazily and stash on the instance
        try:
            return self.__dict__["_index_cache"]
        except KeyError:
            index = {s: i for i, s in enumerate(self.symbols)}
            object.__setattr__(self, "_index_cache", index)
            return index

    def index(self, symbol: str) -> int:
        """Position of a symbol.

        Raises:
            KeyError: if the symbol is not in the alphabet.
        """
        try:
            return self._index[symbol]
        except KeyError:
            raise KeyError(f"Symbol {symbol!r} not in alphabet {list(self.symbols)}") from None

    def encode(self, symbols: Sequence[str] | str) -> np.ndarray:
        """Symbol labels to an int array of indices."""
        if isinstance(symbols, str) and self.compact:
            symbols = list(symbols)
        return np.array([self.index(s) for s in symbols], dtype=np.int64)

    def decode(self, indices: Sequence[int] | np.ndarray) -> list[str]:
        return [self.symbols[int(i)] for i in indices]

    @property
    def compact(self) -> bool:
        """Whether patterns serialize by plain concatenation."""
        return all(len(s) == 1 for s in self.symbols)

    def format_pattern(self, pattern: Sequence[int]) -> str:
        labels = self.decode(pattern)
        return "".join(labels) if self.compact else ",".join(labels)

    def parse_pattern(self, text: str) -> Pattern:
        """Inverse of `format_pattern`.

        Raises:
            KeyError: if the text contains an unknown symbol.
        """
        labels = list(text) if self.compact else text.split(",")
        return tuple(self.index(s) for s in labels)

    def pair(self, other: Alphabet) -> Alphabet:
        """The product alphabet A x B.

        Raises:
            ValueError: if two pairs get the same label, which happens when
                labels already contain the pair separator.
        """
        labels: dict[str, tuple[str, str]] = {}
        for a in self.symbols:
            for b in other.symbols:
                label = f"{a}{PAIR_SEPARATOR}{b}"
                if label in labels:
                    raise ValueError(
                        f"Pairs {labels[label]} and {(a, b)} share the label {label!r}"
                    )
                labels[label] = (a, b)
        return Alphabet(tuple(labels), factors=(self, other))

    def split(self) -> tuple[Alphabet, Alphabet]:
        if self.factors is None:
            raise ValueError(f"Alphabet {list(self.symbols)} is not a product alphabet")
        return self.factors

    def __repr__(self) -> str:
        return f"Alphabet({list(self.symbols)})"


def letters(count: int) -> Alphabet:
    """The alphabet a, b, c, ... with `count` symbols."""
    if not 1 <= count <= 26:
        raise ValueError(f"Letter alphabets hold 1 to 26 symbols, got {count}")
    return Alphabet(tuple("abcdefghijklmnopqrstuvwxyz"[:count]))


@dataclass(frozen=True)
class SymbolMap:
    """A total map between two alphabets, applied symbol by symbol.

    Used for tower projections pi_{i,j}, for projecting microstates and for
    pushing window distributions forward.
    """

    source: Alphabet
    target: Alphabet
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.table) != self.source.size:
            raise ValueError(
                f"Symbol map needs {self.source.size} images, got {len(self.table)}"
            )
        for t in self.table:
            if not 0 <= t < self.target.size:
                raise ValueError(f"Symbol map image {t} outside the target alphabet")

    @classmethod
    def from_dict(
        cls, source: Alphabet, target: Alphabet, mapping: Mapping[str, str]
    ) -> SymbolMap:
        """Build a map from labels, e.g. {"a": "x", "b": "x", "c": "y"}.

        Raises:
            ValueError: if a source symbol has no image.
            KeyError: if a label is unknown.
        """
        missing = [s for s in source.symbols if s not in mapping]
        if missing:
            raise ValueError(f"Symbol map is not total, missing {missing}")
        return cls(source, target, tuple(target.index(mapping[s]) for s in source.symbols))

    @classmethod
    def identity(cls, alphabet: Alphabet) -> SymbolMap:
        return cls(alphabet, alphabet, tuple(range(alphabet.size)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def __call__(self, symbol: str) -> str:
        return self.target.symbols[self.table[self.source.index(symbol)]]

    def to_dict(self) -> dict[str, str]:
        return {s: self.target.symbols[t] for s, t in zip(self.source.symbols, self.table)}

    def apply_pattern(self, pattern: Sequence[int]) -> Pattern:
        return tuple(self.table[i] for i in pattern)

    def apply_labels(self, labels: np.ndarray) -> np.ndarray:
        return self.array[labels]

    def compose(self, other: SymbolMap) -> SymbolMap:
        """self after other: symbols of other.source go through other, then self."""
        if other.target != self.source:
            raise ValueError("Cannot compose symbol maps whose alphabets do not chain")
        return SymbolMap(other.source, self.target, tuple(self.table[t] for t in other.table))

    def product(self, other: SymbolMap) -> SymbolMap:
        """The componentwise map on paired alphabets."""
        source = self.source.pair(other.source)
        target = self.target.pair(other.target)
        table = tuple(
            self.table[i] * other.target.size + other.table[j]
            for i in range(self.source.size)
            for j in range(other.source.size)
        )
        return SymbolMap(source, target, table)
