from __future__ import annotations

from typing import Mapping

import numpy as np

from soficlab.core.models import FiniteModel
from soficlab.core.oracles import CylinderOracle, WindowDistribution
from soficlab.core.transport import cost_matrix, transport_value


class PatternCodec:
    """Window patterns over k symbols as integers, first coordinate most significant.

    Integer order of codes is the lexicographic order of patterns.
    """

    def __init__(self, alphabet_size: int, m: int) -> None:
        if alphabet_size**m >= 2**62:
            raise ValueError(f"Pattern space {alphabet_size}^{m} does not fit in 64-bit codes")
        self.alphabet_size = alphabet_size
        self.m = m
        self.powers = alphabet_size ** np.arange(m - 1, -1, -1, dtype=np.int64)

    def encode(self, patterns: np.ndarray) -> np.ndarray:
        """Codes of patterns stacked along the last axis."""
        return patterns @ self.powers

    def decode(self, codes: np.ndarray) -> np.ndarray:
        """(N,) codes to an (N, m) array of symbol indices."""
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[:, None] // self.powers[None, :]) % self.alphabet_size


class FitKernel:
    """Window distance between the empirical law of a labeling and a fixed target.

    Works on integer pattern codes so that search, counting and the quenched
    test can evaluate many labelings of the same model without building
    distributions. `orbits[v, i]` is sigma^{gamma_{i+1}}(v), so the pattern
    seen from v is labels[orbits[v]].
    """

    def __init__(self, model: FiniteModel, oracle: CylinderOracle, m: int) -> None:
        if model.group != oracle.group:
            raise ValueError(f"Model acts by {model.group}, oracle lives on {oracle.group}")
        self.model = model
        self.oracle = oracle
        self.m = m
        self.alphabet = oracle.alphabet
        self.codec = PatternCodec(self.alphabet.size, m)
        self.orbits = model.orbit_matrix(m)
        self.target: WindowDistribution = oracle.marginal(m)
        self._target_patterns = self.target.patterns_array()
        self._target_weights = self.target.weights()

    def vertex_codes(self, labels: np.ndarray) -> np.ndarray:
        """Pattern code seen from every vertex; works on a batch of labelings too.

        Args:
            labels (np.ndarray): shape (n,) or (batch, n).

        Returns:
            np.ndarray: shape (n,) or (batch, n).
        """
        return self.codec.encode(labels[..., self.orbits])

    def vertex_codes_at(self, labels: np.ndarray, vertices: np.ndarray) -> np.ndarray:
        return self.codec.encode(labels[self.orbits[vertices]])

    def value(self, codes: np.ndarray, counts: np.ndarray) -> float:
        """Window distance of the empirical law with the given code counts.

        Args:
            codes (np.ndarray): distinct pattern codes, ascending.
            counts (np.ndarray): positive multiplicity of each code.
        """
        costs = cost_matrix(self.codec.decode(codes), self._target_patterns)
        value, _ = transport_value(
            np.asarray(counts, dtype=np.float64), self._target_weights, costs
        )
        return max(value, 0.0)

    def value_of_counter(self, counts: Mapping[int, int]) -> float:
        keys = sorted(c for c, k in counts.items() if k > 0)
        return self.value(
            np.array(keys, dtype=np.int64), np.array([counts[c] for c in keys], dtype=np.int64)
        )

    def value_of_labels(self, labels: np.ndarray) -> float:
        codes, counts = np.unique(self.vertex_codes(labels), return_counts=True)
        return self.value(codes, counts)

    def distribution(self, codes: np.ndarray, counts: np.ndarray) -> WindowDistribution:
        """The exact empirical law for code counts."""
        patterns = [tuple(row) for row in self.codec.decode(codes).tolist()]
        return WindowDistribution.from_counts(
            self.alphabet, self.m, dict(zip(patterns, np.asarray(counts).tolist()))
        )
