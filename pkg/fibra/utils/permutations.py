"""Permutations of {0..n-1} as tuples: p maps i to p[i]."""

from typing import Sequence, Tuple

Perm = Tuple[int, ...]


def is_perm(p: Sequence[int]) -> bool:
    """Return True if ``p`` lists every index of ``range(len(p))`` once."""
    return sorted(p) == list(range(len(p)))


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(p1: Sequence[int], p2: Sequence[int]) -> Perm:
    """Compute p1 . p2, i.e. apply p2 first."""
    return tuple(p1[i] for i in p2)


def inverse(p: Sequence[int]) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def conjugate(p: Sequence[int], q: Sequence[int]) -> Perm:
    """Return p . q . p^-1."""
    return compose(compose(p, q), inverse(p))
