"""Word/index bookkeeping shared across modules.

Words over an alphabet of size ``base`` are identified with integers in
big-endian mixed radix: the leftmost cell is the most significant digit and
the all-zero word has index 0.
"""
from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import numpy as np

# Default cap on exhaustive state spaces (|B|**cells style enumerations).
STATE_CAP = 10**7
# Default cap on group order for exhaustive endomorphism enumeration.
ENUMERATION_CAP = 64


def word_index(word: Sequence[int], base: int) -> int:
    """Big-endian index of ``word`` over ``range(base)``."""
    idx = 0
    for w in word:
        idx = idx * base + w
    return idx


def index_word(idx: int, base: int, length: int) -> tuple[int, ...]:
    """Inverse of :func:`word_index`."""
    out = [0] * length
    for t in range(length - 1, -1, -1):
        idx, out[t] = divmod(idx, base)
    return tuple(out)


def iter_words(base: int, length: int) -> Iterator[tuple[int, ...]]:
    """All words of ``length`` cells in index order (lexicographic)."""
    return itertools.product(range(base), repeat=length)


def digit_planes(indices: np.ndarray, base: int, length: int) -> list[np.ndarray]:
    """Per-cell digits of an array of word indices, leftmost cell first."""
    planes: list[np.ndarray] = []
    for t in range(length):
        shift = base ** (length - 1 - t)
        planes.append((indices // shift) % base)
    return planes


def check_cap(size: int, cap: int, what: str) -> None:
    from .errors import CapExceededError

    if size > cap:
        raise CapExceededError(f"{what}: {size} states exceed cap {cap}")
