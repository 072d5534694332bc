from __future__ import annotations

from typing import Any

import numpy as np
from numpy.typing import ArrayLike


class Permutation:
    """A permutation of V = {0, ..., n-1}, stored as its image array.

    Composition follows function composition: `p.compose(q)` is p after q,
    i.e. v -> p(q(v)).
    """

    __slots__ = ("_image",)

    def __init__(self, image: ArrayLike, check: bool = True) -> None:
        """Initialize the Permutation.

        Args:
            image (ArrayLike): image[v] is the image of v.
            check (bool, optional): validate bijectivity. Defaults to True.

        Raises:
            ValueError: if the image is not a permutation of 0..n-1.
        """
        arr = np.array(image, dtype=np.int64)
        if check:
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError("A permutation needs a nonempty 1-d image array")
            if not np.array_equal(np.sort(arr), np.arange(arr.size)):
                raise ValueError(f"Image array is not a permutation of 0..{arr.size - 1}")
        arr.setflags(write=False)
        self._image = arr

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(np.arange(n), check=False)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> Permutation:
        """Uniform random element of Sym(V)."""
        return cls(rng.permutation(n), check=False)

    @property
    def image(self) -> np.ndarray:
        return self._image

    @property
    def size(self) -> int:
        return int(self._image.size)

    def __len__(self) -> int:
        return self.size

    def __call__(self, v: int) -> int:
        return int(self._image[v])

    def compose(self, other: Permutation) -> Permutation:
        """The permutation v -> self(other(v)).

        Raises:
            ValueError: if the permutations act on sets of different sizes.
        """
        if other.size != self.size:
            raise ValueError(f"Cannot compose permutations of sizes {self.size} and {other.size}")
        return Permutation(self._image[other._image], check=False)

    def inverse(self) -> Permutation:
        inv = np.empty_like(self._image)
        inv[self._image] = np.arange(self.size)
        return Permutation(inv, check=False)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._image, np.arange(self.size)))

    def tolist(self) -> list[int]:
        return [int(x) for x in self._image]

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return bool(np.array_equal(self._image, other._image))

    def __hash__(self) -> int:
        return hash(self._image.tobytes())

    def __repr__(self) -> str:
        if self.size <= 12:
            return f"Permutation({self.tolist()})"
        return f"Permutation(<{self.size} points>)"


def hamming_count(p: Permutation, q: Permutation) -> int:
    """Number of points on which two permutations disagree."""
    if p.size != q.size:
        raise ValueError(f"Permutations act on sets of different sizes: {p.size} != {q.size}")
    return int(np.count_nonzero(p.image != q.image))


def hamming(p: Permutation, q: Permutation) -> float:
    """Normalized Hamming distance |{v : p(v) != q(v)}| / |V|.

    Raises:
        ValueError: if the permutations act on sets of different sizes.
    """
    return hamming_count(p, q) / p.size
