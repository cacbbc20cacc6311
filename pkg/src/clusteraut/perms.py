"""Permutations of {1..n} stored as 0-based image tuples.

``p[i]`` is the image of ``i``; the public (1-based) image list of ``p`` is
``[p[0] + 1, ..., p[n-1] + 1]``.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def from_images(images: Sequence[int]) -> Perm:
    """Build a permutation from the 1-based list [sigma(1), ..., sigma(n)]."""
    p = tuple(int(v) - 1 for v in images)
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"not a permutation: {list(images)}")
    return p


def to_images(p: Perm) -> list[int]:
    return [v + 1 for v in p]


def from_cycles(text: str, n: int) -> Perm:
    """Parse cycle notation such as ``(24)(35)`` or ``(1 3 2)(4 5 6 7)``.

    Single-digit labels may be written without separators.
    """
    images = list(range(n))
    for body in re.findall(r"\(([^()]*)\)", text):
        parts = body.replace(",", " ").split()
        if len(parts) == 1 and len(parts[0]) > 1:
            parts = list(parts[0])
        labels = [int(x) - 1 for x in parts]
        if any(not 0 <= a < n for a in labels) or len(set(labels)) != len(labels):
            raise ValueError(f"bad cycle {body!r} for n={n}")
        for a, b in zip(labels, labels[1:] + labels[:1]):
            images[a] = b
    if sorted(images) != list(range(n)):
        raise ValueError(f"bad cycle notation {text!r} for n={n}")
    return tuple(images)


def to_cycles(p: Perm) -> str:
    seen = set()
    out = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc = []
        i = start
        while i not in seen:
            seen.add(i)
            cyc.append(str(i + 1))
            i = p[i]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "()"


def compose(p: Perm, q: Perm) -> Perm:
    """Return p after q, i.e. i -> p[q[i]]."""
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def relabel(p: Perm, labels: Iterable[int]) -> tuple[int, ...]:
    """Apply p to 1-based direction labels."""
    return tuple(p[k - 1] + 1 for k in labels)
