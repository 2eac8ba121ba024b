from __future__ import annotations

from typing import Sequence

from ..core import Action

__all__ = ["suffix", "occurrences", "SuffixTooLong"]


class SuffixTooLong(ValueError):
    pass


def suffix(alpha: Sequence[Action], n: int) -> tuple[Action, ...]:
    """The last ``n`` actions of ``alpha``, in order."""
    if n < 0 or n > len(alpha):
        raise SuffixTooLong(f"suffix of length {n} requested from a sequence of length {len(alpha)}")
    return tuple(alpha[len(alpha) - n:])


def occurrences(alpha: Sequence[Action], a: Action) -> int:
    return sum(1 for b in alpha if b == a)
