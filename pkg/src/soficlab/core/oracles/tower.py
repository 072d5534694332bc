from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, overload

from soficlab.core.oracles.alphabet import Alphabet, SymbolMap
from soficlab.core.oracles.distribution import WindowDistribution


@dataclass(frozen=True)
class ObservableTower:
    """A refining sequence of alphabets A_1, A_2, ... with projections pi_{i,j}: A_i -> A_j.

    Levels are numbered from 1. A map is stored for every pair i > j and the
    composition law pi_{j,i} o pi_{k,j} = pi_{k,i} (k > j > i) is checked at
    construction. Sufficiency of the tower is a modelling assumption and is
    not verified.
    """

    alphabets: tuple[Alphabet, ...]
    maps: Mapping[tuple[int, int], SymbolMap]

    def __post_init__(self) -> None:
        levels = len(self.alphabets)
        if levels == 0:
            raise ValueError("A tower needs at least one level")
        for i in range(1, levels + 1):
            for j in range(1, i):
                pi = self.maps.get((i, j))
                if pi is None:
                    raise ValueError(f"Tower is missing the projection pi_{{{i},{j}}}")
                if pi.source != self.alphabets[i - 1] or pi.target != self.alphabets[j - 1]:
                    raise ValueError(f"Projection pi_{{{i},{j}}} does not map A_{i} to A_{j}")
        for k in range(1, levels + 1):
            for j in range(1, k):
                for i in range(1, j):
                    if self.maps[(j, i)].compose(self.maps[(k, j)]) != self.maps[(k, i)]:
                        raise ValueError(
                            f"Composition law fails: pi_{{{j},{i}}} o pi_{{{k},{j}}} != pi_{{{k},{i}}}"
                        )

    @classmethod
    def from_steps(cls, alphabets: Sequence[Alphabet], steps: Sequence[SymbolMap]) -> ObservableTower:
        """Build a tower from the consecutive maps A_{i+1} -> A_i.

        Args:
            alphabets (Sequence[Alphabet]): A_1, ..., A_L.
            steps (Sequence[SymbolMap]): steps[i] maps A_{i+2} to A_{i+1}, L-1 maps.

        Raises:
            ValueError: if the step count or alphabets do not line up.

        Returns:
            ObservableTower: the tower with every pi_{i,j} composed from the steps.
        """
        if len(steps) != len(alphabets) - 1:
            raise ValueError(f"Need {len(alphabets) - 1} steps, got {len(steps)}")
        maps: dict[tuple[int, int], SymbolMap] = {}
        for i in range(2, len(alphabets) + 1):
            step = steps[i - 2]
            if step.source != alphabets[i - 1] or step.target != alphabets[i - 2]:
                raise ValueError(f"Step {i - 2} does not map A_{i} to A_{i - 1}")
            maps[(i, i - 1)] = step
            for j in range(i - 2, 0, -1):
                maps[(i, j)] = maps[(i - 1, j)].compose(step)
        return cls(tuple(alphabets), maps)

    @property
    def levels(self) -> int:
        return len(self.alphabets)

    def alphabet(self, i: int) -> Alphabet:
        self._check_level(i)
        return self.alphabets[i - 1]

    def projection(self, i: int, j: int) -> SymbolMap:
        """pi_{i,j}.

        Raises:
            ValueError: if i <= j or a level is out of range.
        """
        self._check_level(i)
        self._check_level(j)
        if i <= j:
            raise ValueError(f"Projections go down the tower, got i={i} <= j={j}")
        return self.maps[(i, j)]

    def _check_level(self, i: int) -> None:
        if not 1 <= i <= self.levels:
            raise ValueError(f"Tower level {i} out of range 1..{self.levels}")


@overload
def tower_project(tower: ObservableTower, i: int, j: int, obj: str) -> str: ...
@overload
def tower_project(
    tower: ObservableTower, i: int, j: int, obj: WindowDistribution
) -> WindowDistribution: ...
@overload
def tower_project(
    tower: ObservableTower, i: int, j: int, obj: tuple[int, ...]
) -> tuple[int, ...]: ...


def tower_project(tower, i, j, obj):
    """Apply pi_{i,j} to a pattern or push a window distribution forward.

    Patterns may be formatted strings ("abc") or tuples of symbol indices;
    the result has the same shape as the input.
    """
    pi = tower.projection(i, j)
    if isinstance(obj, WindowDistribution):
        return obj.pushforward(pi)
    if isinstance(obj, str):
        pattern = pi.source.parse_pattern(obj)
        return pi.target.format_pattern(pi.apply_pattern(pattern))
    return pi.apply_pattern(obj)


def product_tower(t1: ObservableTower, t2: ObservableTower) -> ObservableTower:
    """Levelwise product: A_i = A'_i x A''_i with componentwise projections.

    Raises:
        ValueError: if the towers have different lengths.
    """
    if t1.levels != t2.levels:
        raise ValueError(f"Towers have different lengths: {t1.levels} != {t2.levels}")
    alphabets = tuple(a.pair(b) for a, b in zip(t1.alphabets, t2.alphabets))
    maps = {key: pi.product(t2.maps[key]) for key, pi in t1.maps.items()}
    return ObservableTower(alphabets, maps)
