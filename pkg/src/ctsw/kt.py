"""Krichevsky-Trofimov estimator for binary sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class KtCounts:
    """Zero/one counts of a binary subsequence and its log2 KT probability.

    Counts are reals so that count scaling can share the same code path as
    the plain estimator.
    """

    a: float = 0.0
    b: float = 0.0
    log_prob: float = 0.0


def kt_predict(counts: KtCounts, symbol: int) -> float:
    """Probability that the next bit equals ``symbol``."""
    total = counts.a + counts.b + 1.0
    if symbol:
        return (counts.b + 0.5) / total
    return (counts.a + 0.5) / total


def kt_update(counts: KtCounts, symbol: int, scale: float = 1.0) -> KtCounts:
    """Absorb one bit: accumulate its log probability, count it, then scale.

    The order predict -> increment -> scale is fixed; ``scale`` < 1 gives
    the exponentially forgetting variant.
    """
    if not 0.0 < scale <= 1.0:
        raise ValueError(f"scale must lie in (0, 1], got {scale!r}")
    log_prob = counts.log_prob + math.log2(kt_predict(counts, symbol))
    a, b = counts.a, counts.b
    if symbol:
        b += 1.0
    else:
        a += 1.0
    if scale != 1.0:
        a *= scale
        b *= scale
    return KtCounts(a, b, log_prob)


def kt_sequence(bits, scale: float = 1.0) -> KtCounts:
    counts = KtCounts()
    for bit in bits:
        counts = kt_update(counts, bit, scale)
    return counts
