"""Skew-symmetrizable exchange matrices.

Directions are 1-based everywhere in the public API (``mutate_matrix(B, 1)``
mutates at the first vertex); permutations are 0-based image tuples from
:mod:`clusteraut.perms`.
"""

from __future__ import annotations

import json
import math
import struct
from fractions import Fraction
from functools import lru_cache, total_ordering
from pathlib import Path
from typing import Iterator, Sequence

from .errors import IntegerOverflow, NotSkewSymmetrizable
from .perms import Perm, inverse

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

Rows = tuple[tuple[int, ...], ...]


def _check_int64(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise IntegerOverflow(f"matrix entry {value} exceeds the signed 64-bit range")
    return value


class ExchangeMatrix:
    """An immutable n x n skew-symmetrizable integer matrix."""

    __slots__ = ("entries", "_hash")

    def __init__(self, rows: Sequence[Sequence[int]], check: bool = True):
        entries = tuple(tuple(int(v) for v in row) for row in rows)
        if check:
            n = len(entries)
            if n == 0 or any(len(row) != n for row in entries):
                raise ValueError("exchange matrix must be square and non-empty")
            for row in entries:
                for v in row:
                    _check_int64(v)
            skew_symmetrizer(entries)
        self.entries: Rows = entries
        self._hash = hash(entries)

    @classmethod
    def from_quiver(cls, n: int, arrows: Sequence[tuple[int, int, int]]) -> "ExchangeMatrix":
        """Skew-symmetric matrix from arrows ``(i, j, multiplicity)`` (1-based)."""
        rows = [[0] * n for _ in range(n)]
        for i, j, m in arrows:
            rows[i - 1][j - 1] += m
            rows[j - 1][i - 1] -= m
        return cls(rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        """Entry b_ij with 1-based indices."""
        i, j = ij
        return self.entries[i - 1][j - 1]

    def column(self, k: int) -> tuple[int, ...]:
        return tuple(row[k - 1] for row in self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExchangeMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return self._hash

    def __neg__(self) -> "ExchangeMatrix":
        return ExchangeMatrix([[-v for v in row] for row in self.entries], check=False)

    def __repr__(self) -> str:
        return f"ExchangeMatrix({[list(r) for r in self.entries]})"

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def mutate_matrix(B: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Matrix mutation in direction k (1-based)."""
    n = B.n
    if not 1 <= k <= n:
        raise ValueError(f"direction {k} out of range 1..{n}")
    k -= 1
    b = B.entries
    bk = b[k]
    rows = []
    for i in range(n):
        bi = b[i]
        if i == k:
            rows.append(tuple(-v for v in bi))
            continue
        bik = bi[k]
        if bik == 0:
            row = list(bi)
            row[k] = 0
        elif bik > 0:
            row = [v + bik * bkj if bkj > 0 else v for v, bkj in zip(bi, bk)]
            row[k] = -bik
        else:
            row = [v - bik * bkj if bkj < 0 else v for v, bkj in zip(bi, bk)]
            row[k] = -bik
        rows.append(tuple(row))
    for row in rows:
        for v in row:
            if v > INT64_MAX or v < INT64_MIN:
                raise IntegerOverflow(f"mutation at {k + 1} produced entry {v}")
    return ExchangeMatrix(rows, check=False)


def _as_rows(B) -> Rows:
    if isinstance(B, ExchangeMatrix):
        return B.entries
    return tuple(tuple(int(v) for v in row) for row in B)


def _components(b: Rows) -> list[list[int]]:
    n = len(b)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp, stack = [], [s]
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and (b[i][j] or b[j][i]):
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def skew_symmetrizer(B) -> tuple[int, ...]:
    """Componentwise-minimal positive D with d_i b_ij = -d_j b_ji.

    Each connected component of the underlying graph is normalised on its own,
    isolated vertices get 1.
    """
    b = _as_rows(B)
    n = len(b)
    if any(len(row) != n for row in b):
        raise NotSkewSymmetrizable("matrix is not square")
    for i in range(n):
        if b[i][i] != 0:
            raise NotSkewSymmetrizable(f"nonzero diagonal entry at {i + 1}")
        for j in range(i + 1, n):
            if (b[i][j] == 0) != (b[j][i] == 0) or b[i][j] * b[j][i] > 0:
                raise NotSkewSymmetrizable(f"sign condition fails at ({i + 1},{j + 1})")
    d: list[Fraction | None] = [None] * n
    for comp in _components(b):
        root = comp[0]
        d[root] = Fraction(1)
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if b[i][j] == 0:
                    continue
                want = d[i] * b[i][j] / -b[j][i]
                if d[j] is None:
                    d[j] = want
                    stack.append(j)
                elif d[j] != want:
                    raise NotSkewSymmetrizable("no consistent symmetrizer (cycle condition fails)")
        lcm = 1
        for i in comp:
            lcm = lcm * d[i].denominator // math.gcd(lcm, d[i].denominator)
        ints = [int(d[i] * lcm) for i in comp]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        for i, v in zip(comp, ints):
            d[i] = Fraction(v // g)
    return tuple(int(x) for x in d)


def permute_matrix(sigma: Perm, B: ExchangeMatrix) -> ExchangeMatrix:
    """The S_n action: (sigma B)_ij = b_{sigma^-1(i) sigma^-1(j)}."""
    inv = inverse(sigma)
    b = B.entries
    return ExchangeMatrix([[b[inv[i]][inv[j]] for j in range(B.n)] for i in range(B.n)], check=False)


def isomorphisms(A: ExchangeMatrix, C: ExchangeMatrix, sign: int = 1) -> Iterator[Perm]:
    """Yield every sigma with sigma(A) = sign * C, in lexicographic order of images."""
    n = A.n
    if C.n != n:
        return
    a, c = A.entries, C.entries
    row_sig_a = [tuple(sorted(zip(a[i], (a[j][i] for j in range(n))))) for i in range(n)]
    row_sig_c = [
        tuple(sorted(zip((sign * v for v in c[i]), (sign * c[j][i] for j in range(n))))) for i in range(n)
    ]
    candidates = [[v for v in range(n) if row_sig_c[v] == row_sig_a[i]] for i in range(n)]
    if any(not cand for cand in candidates):
        return
    image = [0] * n
    used = [False] * n

    def extend(i: int) -> Iterator[Perm]:
        if i == n:
            yield tuple(image)
            return
        ai = a[i]
        for v in candidates[i]:
            if used[v]:
                continue
            cv = c[v]
            ok = True
            for j in range(i):
                w = image[j]
                if ai[j] != sign * cv[w] or a[j][i] != sign * c[w][v]:
                    ok = False
                    break
            if ok:
                used[v] = True
                image[i] = v
                yield from extend(i + 1)
                used[v] = False

    yield from extend(0)


def _refined_colors(b: Rows) -> list[int]:
    n = len(b)

    def ranks(sig):
        table = {s: r for r, s in enumerate(sorted(set(sig)))}
        return [table[s] for s in sig]

    colors = ranks([tuple(sorted((b[i][j], b[j][i]) for j in range(n) if j != i)) for i in range(n)])
    while True:
        new = ranks(
            [
                (colors[i], tuple(sorted((b[i][j], b[j][i], colors[j]) for j in range(n) if j != i)))
                for i in range(n)
            ]
        )
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _canonical_flat(b: Rows) -> tuple[int, ...]:
    """Least flattening over color-respecting relabelings (branch and bound).

    Position k contributes (m[k][j], m[j][k]) for j < k, so a partial
    assignment of the first positions fixes a prefix of the flattening.
    """
    n = len(b)
    colors = _refined_colors(b)
    slots = sorted(colors)
    order: list[int] = []
    used = [False] * n
    best: list[tuple[int, ...] | None] = [None]
    prefix: list[int] = []

    def search(k: int) -> None:
        if k == n:
            cand = tuple(prefix)
            if best[0] is None or cand < best[0]:
                best[0] = cand
            return
        for v in range(n):
            if used[v] or colors[v] != slots[k]:
                continue
            start = len(prefix)
            for u in order:
                prefix.append(b[v][u])
                prefix.append(b[u][v])
            if best[0] is not None and tuple(prefix) > best[0][: len(prefix)]:
                del prefix[start:]
                continue
            used[v] = True
            order.append(v)
            search(k + 1)
            order.pop()
            used[v] = False
            del prefix[start:]

    search(0)
    return best[0]


@lru_cache(maxsize=200_000)
def _class_key_rows(b: Rows) -> bytes:
    neg = tuple(tuple(-v for v in row) for row in b)
    flat = min(_canonical_flat(b), _canonical_flat(neg))
    return struct.pack(f">{len(flat) + 1}q", len(b), *flat)


def class_key(B: ExchangeMatrix) -> bytes:
    """Canonical bytes for the class [B] = {eps * sigma(B)}."""
    return _class_key_rows(B.entries)


def same_class(A: ExchangeMatrix, C: ExchangeMatrix) -> bool:
    return class_key(A) == class_key(C)


def arrows(B: ExchangeMatrix) -> list[tuple[int, int, int]]:
    """Arrows of the weighted graph as (i, j, squared weight), 1-based."""
    b = B.entries
    return [(i + 1, j + 1, -b[i][j] * b[j][i]) for i in range(B.n) for j in range(B.n) if b[i][j] > 0]


def is_acyclic(B: ExchangeMatrix) -> bool:
    n = B.n
    b = B.entries
    indeg = [sum(1 for i in range(n) if b[i][j] > 0) for j in range(n)]
    ready = [j for j in range(n) if indeg[j] == 0]
    removed = 0
    while ready:
        i = ready.pop()
        removed += 1
        for j in range(n):
            if b[i][j] > 0:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
    return removed == n


def is_indecomposable(B: ExchangeMatrix) -> bool:
    return len(_components(B.entries)) == 1


def _squarefree_split(m: int) -> tuple[int, int]:
    """Write m = a^2 * r with r squarefree; return (a, r)."""
    a, r = 1, 1
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        a *= p ** (e // 2)
        if e % 2:
            r *= p
        p += 1
    return a, r * m


@total_ordering
class WeightSum:
    """Exact value of a sum of square roots of nonnegative integers.

    Stored as {squarefree r: integer coefficient}.  Equality is exact because
    square roots of distinct squarefree integers are linearly independent over
    the rationals; ordering refines an interval until it excludes zero.
    """

    __slots__ = ("terms",)

    def __init__(self, squared: Sequence[int] = ()):
        terms: dict[int, int] = {}
        for m in squared:
            if m < 0:
                raise ValueError("squared weight must be nonnegative")
            if m == 0:
                continue
            a, r = _squarefree_split(m)
            terms[r] = terms.get(r, 0) + a
        self.terms = terms

    @classmethod
    def _from_terms(cls, terms: dict[int, int]) -> "WeightSum":
        obj = cls()
        obj.terms = {r: c for r, c in terms.items() if c}
        return obj

    def is_integer(self) -> bool:
        return set(self.terms) <= {1}

    def __sub__(self, other: "WeightSum") -> "WeightSum":
        terms = dict(self.terms)
        for r, c in other.terms.items():
            terms[r] = terms.get(r, 0) - c
        return WeightSum._from_terms(terms)

    def sign(self) -> int:
        if not self.terms:
            return 0
        if self.is_integer():
            v = self.terms[1]
            return (v > 0) - (v < 0)
        bits = 32
        while True:
            scale = 4**bits
            lo = hi = 0
            for r, c in self.terms.items():
                s = math.isqrt(c * c * r * scale)
                exact = s * s == c * c * r * scale
                if c > 0:
                    lo += s
                    hi += s if exact else s + 1
                else:
                    lo -= s if exact else s + 1
                    hi -= s
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = WeightSum([other * other]) if other >= 0 else NotImplemented
        if not isinstance(other, WeightSum):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other: "WeightSum") -> bool:
        if isinstance(other, int):
            other = WeightSum([other * other])
        return (self - other).sign() < 0

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __float__(self) -> float:
        return float(sum(c * math.sqrt(r) for r, c in self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for r, c in sorted(self.terms.items()):
            parts.append(str(c) if r == 1 else (f"sqrt({r})" if c == 1 else f"{c}*sqrt({r})"))
        return " + ".join(parts)

    __repr__ = __str__


def weight_sum(B: ExchangeMatrix) -> WeightSum:
    """Sum over arrows of sqrt(-b_ij b_ji)."""
    return WeightSum([m for _, _, m in arrows(B)])


def weight_label(m: int) -> str:
    r = math.isqrt(m)
    return str(r) if r * r == m else f"sqrt({m})"


def to_dot(B: ExchangeMatrix, name: str = "Gamma") -> str:
    lines = [f"digraph {name} {{"]
    for i in range(1, B.n + 1):
        lines.append(f"  {i};")
    for i, j, m in arrows(B):
        lines.append(f'  {i} -> {j} [label="{weight_label(m)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def matrix_to_json(B: ExchangeMatrix) -> dict:
    return {"n": B.n, "B": B.tolist()}


def matrix_from_json(obj: dict) -> ExchangeMatrix:
    if "B" not in obj:
        raise ValueError('matrix file needs a "B" field')
    B = ExchangeMatrix(obj["B"])
    if "n" in obj and int(obj["n"]) != B.n:
        raise ValueError(f'"n" = {obj["n"]} does not match the {B.n}x{B.n} matrix')
    return B


def load_matrix(path: str | Path) -> ExchangeMatrix:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))
