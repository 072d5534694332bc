from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Mapping

from soficlab.core.oracles.alphabet import Alphabet, Pattern, SymbolMap

if TYPE_CHECKING:
    from soficlab.core.oracles.oracle import CylinderOracle


@dataclass(frozen=True)
class BlockCode:
    """A sliding-block observable: a map B^{W_w} -> A.

    The factor configuration is y(g) = code(x(gamma_1 g), ..., x(gamma_w g)),
    the coordinate formula (f^G(x))(g) = f(g x) for the left shift
    (h x)(g) = x(g h).
    """

    source: Alphabet
    target: Alphabet
    window: int
    table: Mapping[Pattern, int]

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError(f"Code window must be positive, got {self.window}")
        for pattern in itertools.product(range(self.source.size), repeat=self.window):
            image = self.table.get(pattern)
            if image is None:
                raise ValueError(
                    f"Block code is not total: no image for {self.source.format_pattern(pattern)!r}"
                )
            if not 0 <= image < self.target.size:
                raise ValueError(f"Block code image {image} outside the output alphabet")

    @classmethod
    def from_dict(
        cls,
        source: Alphabet,
        window: int,
        code: Mapping[str, str],
        target: Alphabet | None = None,
    ) -> BlockCode:
        """Build a code from labels, e.g. {"aa": "x", "ab": "y", "ba": "y", "bb": "x"}.

        The output alphabet defaults to the sorted distinct images.
        """
        if target is None:
            target = Alphabet(tuple(sorted(set(code.values()))))
        table = {source.parse_pattern(k): target.index(v) for k, v in code.items()}
        for pattern in table:
            if len(pattern) != window:
                raise ValueError(
                    f"Code input {source.format_pattern(pattern)!r} does not have length {window}"
                )
        return cls(source, target, window, table)

    @classmethod
    def from_symbol_map(cls, symbol_map: SymbolMap) -> BlockCode:
        """The window-1 code applying a symbol map."""
        table = {(i,): t for i, t in enumerate(symbol_map.table)}
        return cls(symbol_map.source, symbol_map.target, 1, table)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> BlockCode:
        return cls.from_symbol_map(SymbolMap.identity(alphabet))

    @classmethod
    def constant(cls, source: Alphabet, target: Alphabet, symbol: str, window: int = 1) -> BlockCode:
        image = target.index(symbol)
        table = {p: image for p in itertools.product(range(source.size), repeat=window)}
        return cls(source, target, window, table)

    def __call__(self, pattern: Pattern) -> int:
        return self.table[tuple(pattern)]

    def inputs(self) -> list[Pattern]:
        return list(itertools.product(range(self.source.size), repeat=self.window))

    def to_dict(self) -> dict[str, Any]:
        return {
            "window": self.window,
            "alphabet": list(self.target.symbols),
            "code": {
                self.source.format_pattern(p): self.target.symbols[self.table[p]]
                for p in self.inputs()
            },
        }

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.window, tuple(sorted(self.table.items()))))


def code_disagreement(parent: CylinderOracle, c1: BlockCode, c2: BlockCode) -> float:
    """Parent mass of the input patterns on which two codes differ.

    This is the observable distance mu{f1 != f2} between the two
    sliding-block observables.

    Raises:
        ValueError: if the codes do not share input alphabet, window and output alphabet.
    """
    if (c1.source, c1.target, c1.window) != (c2.source, c2.target, c2.window):
        raise ValueError("Codes must share input alphabet, output alphabet and window")
    if c1.source != parent.alphabet:
        raise ValueError("Code input alphabet does not match the parent oracle")
    marginal = parent.marginal(c1.window)
    return float(sum(p for pattern, p in marginal.mass.items() if c1(pattern) != c2(pattern)))
