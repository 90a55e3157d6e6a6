"""Sequence-to-symbols transform: windowed intrinsic means, then
nearest-symbol assignment; plus reconstruction and the bit-budget arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import codebook as cb_mod
from . import stats
from .codebook import Codebook, render_symbols
from .errors import ArtifactMismatchError, IncompatibleManifoldsError, ValidationError
from .stats import KarcherConfig, ManifoldSequence


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """Encoded activity: M = ceil(N / W) symbol indices plus metadata.

    ``alphabet_size`` records the codebook size K; it is what a decoder needs
    to size the per-symbol bit field.
    """

    codebook_id: str
    window: int
    symbols: np.ndarray  # (M,) int64
    source_len: int
    alphabet_size: int
    id: str = ""
    label: str | None = None

    def __post_init__(self):
        syms = np.asarray(self.symbols, dtype=np.int64).reshape(-1)
        if self.window < 1:
            raise ValidationError("window must be >= 1")
        if self.source_len < 1:
            raise ValidationError("source length must be >= 1")
        expected = math.ceil(self.source_len / self.window)
        if syms.size != expected:
            raise ValidationError(
                f"expected ceil({self.source_len}/{self.window}) = {expected} "
                f"symbols, got {syms.size}"
            )
        if syms.size and (syms.min() < 0 or syms.max() >= self.alphabet_size):
            raise ValidationError(f"symbol indices must lie in [0, {self.alphabet_size})")
        if syms.flags.writeable:
            syms = syms.copy()
            syms.flags.writeable = False
        object.__setattr__(self, "symbols", syms)

    def __len__(self) -> int:
        return self.symbols.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolSequence):
            return NotImplemented
        return (
            self.codebook_id == other.codebook_id
            and self.window == other.window
            and self.source_len == other.source_len
            and self.alphabet_size == other.alphabet_size
            and self.id == other.id
            and self.label == other.label
            and np.array_equal(self.symbols, other.symbols)
        )

    def render(self) -> str:
        return render_symbols(self.symbols, self.alphabet_size)


def encode(
    seq: ManifoldSequence,
    cb: Codebook,
    window: int,
    karcher_cfg: KarcherConfig | None = None,
) -> SymbolSequence:
    """Symbolic approximation of a sequence: assign each PAA window mean to
    its nearest symbol."""
    if seq.descriptor != cb.descriptor:
        raise IncompatibleManifoldsError(
            f"sequence on {seq.descriptor.spec()} vs codebook on {cb.descriptor.spec()}"
        )
    if window < 1:
        raise ValidationError("window must be >= 1")
    agg = stats.paa(seq, window, karcher_cfg)
    labels = cb_mod.assign_many(agg.points, cb)
    return SymbolSequence(
        codebook_id=cb.id,
        window=window,
        symbols=labels,
        source_len=len(seq),
        alphabet_size=cb.k,
        id=seq.id,
        label=seq.label,
    )


def reconstruct(ss: SymbolSequence, cb: Codebook) -> ManifoldSequence:
    """Approximate inverse of encode: each symbol's prototype held for W
    frames (zero-order hold), truncated to the source length."""
    if ss.codebook_id != cb.id:
        raise ArtifactMismatchError(
            f"sequence was encoded with codebook {ss.codebook_id}, got {cb.id}"
        )
    frames = np.repeat(cb.prototypes[ss.symbols], ss.window, axis=0)[: ss.source_len]
    return ManifoldSequence(cb.descriptor, frames, id=ss.id, label=ss.label)


class BitBudget(NamedTuple):
    original_bits: int
    symbolic_bits: int
    compression_ratio: float


def bit_budget(ss: SymbolSequence, original_dim: int, bits_per_scalar: int = 32) -> BitBudget:
    """Storage comparison: N*dim floats versus M symbols of ceil(log2 K) bits."""
    if original_dim < 1 or bits_per_scalar < 1:
        raise ValidationError("dimensions and bit widths must be positive")
    original = ss.source_len * original_dim * bits_per_scalar
    per_symbol = math.ceil(math.log2(ss.alphabet_size)) if ss.alphabet_size > 1 else 0
    symbolic = len(ss) * per_symbol
    return BitBudget(original, symbolic, 1.0 - symbolic / original)
