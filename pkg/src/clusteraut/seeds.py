"""Labeled seeds, tree paths and cluster patterns.

Paths list mutation directions in application order: ``(2, 1, 3)`` means
mutate at 2 first, then 1, then 3.  The operator-order subscript used in
printed formulas (``g_{312}``) is the reversed string; see
:func:`paper_subscript`.
"""

from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import InvalidPath, PatternMismatch
from .exmatrix import ExchangeMatrix, mutate_matrix, permute_matrix
from .laurent import LaurentPoly, exact_div, variables
from .perms import Perm, identity, inverse

TreePath = tuple[int, ...]

# Modulus for the numeric fingerprint of cluster variables (a Mersenne prime).
FINGERPRINT_PRIME = 2**61 - 1


def reduce_path(labels: Iterable[int]) -> TreePath:
    """Cancel adjacent equal labels (mutations are involutions)."""
    out: list[int] = []
    for k in labels:
        if out and out[-1] == k:
            out.pop()
        else:
            out.append(int(k))
    return tuple(out)


def check_path(path: Sequence[int], n: int) -> TreePath:
    path = tuple(int(k) for k in path)
    for k in path:
        if not 1 <= k <= n:
            raise InvalidPath(f"direction {k} out of range 1..{n}")
    for a, b in zip(path, path[1:]):
        if a == b:
            raise InvalidPath(
                f"path {list(path)} is not reduced: repeated {a} cancels since each mutation is an involution"
            )
    return path


def append_step(path: TreePath, k: int) -> TreePath:
    if path and path[-1] == k:
        return path[:-1]
    return path + (k,)


def paper_subscript(path: Sequence[int]) -> str:
    """Operator-order rendering, e.g. (4, 3, 2, 1) -> '1234'."""
    sep = "" if all(k < 10 for k in path) else ","
    return sep.join(str(k) for k in reversed(path))


def mutate_cmatrix(C: tuple[tuple[int, ...], ...], B: ExchangeMatrix, k: int) -> tuple[tuple[int, ...], ...]:
    """Principal-coefficient companion: mutate the bottom block of [B; C]."""
    k -= 1
    bk = B.entries[k]
    rows = []
    for row in C:
        cik = row[k]
        if cik > 0:
            new = [v + cik * bkj if bkj > 0 else v for v, bkj in zip(row, bk)]
        elif cik < 0:
            new = [v - cik * bkj if bkj < 0 else v for v, bkj in zip(row, bk)]
        else:
            new = list(row)
        new[k] = -cik
        rows.append(tuple(new))
    return tuple(rows)


def _exchange_binomial(cluster: Sequence[LaurentPoly], B: ExchangeMatrix, k: int) -> LaurentPoly:
    n = B.n
    plus = LaurentPoly.constant(n, 1)
    minus = LaurentPoly.constant(n, 1)
    for j in range(n):
        b = B.entries[j][k - 1]
        if b > 0:
            plus = plus * cluster[j] ** b
        elif b < 0:
            minus = minus * cluster[j] ** (-b)
    return plus + minus


@dataclass(frozen=True)
class LabeledSeed:
    cluster: tuple[LaurentPoly, ...]
    matrix: ExchangeMatrix
    cmatrix: Optional[tuple[tuple[int, ...], ...]] = None
    path: TreePath = ()
    pattern: Optional[int] = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.matrix.n


_pattern_ids = itertools.count(1)


def root_seed(B: ExchangeMatrix, with_cmatrix: bool = False, pattern: Optional[int] = None) -> LabeledSeed:
    n = B.n
    C = tuple(tuple(int(i == j) for j in range(n)) for i in range(n)) if with_cmatrix else None
    return LabeledSeed(variables(n), B, C, (), pattern)


def mutate_seed(seed: LabeledSeed, k: int) -> LabeledSeed:
    n = seed.n
    if not 1 <= k <= n:
        raise InvalidPath(f"direction {k} out of range 1..{n}")
    B = seed.matrix
    new_var = exact_div(_exchange_binomial(seed.cluster, B, k), seed.cluster[k - 1])
    cluster = seed.cluster[: k - 1] + (new_var,) + seed.cluster[k:]
    C = mutate_cmatrix(seed.cmatrix, B, k) if seed.cmatrix is not None else None
    return LabeledSeed(cluster, mutate_matrix(B, k), C, append_step(seed.path, k), seed.pattern)


def mutate_along(seed: LabeledSeed, path: Sequence[int]) -> LabeledSeed:
    for k in check_path(path, seed.n):
        seed = mutate_seed(seed, k)
    return seed


def permute_seed(sigma: Perm, seed: LabeledSeed) -> LabeledSeed:
    """x'_i = x_{sigma^-1(i)}, B' = sigma(B); the C-matrix columns follow the cluster."""
    inv = inverse(sigma)
    cluster = tuple(seed.cluster[inv[i]] for i in range(seed.n))
    C = None
    if seed.cmatrix is not None:
        C = tuple(tuple(row[inv[j]] for j in range(seed.n)) for row in seed.cmatrix)
    return LabeledSeed(cluster, permute_matrix(sigma, seed.matrix), C, seed.path, seed.pattern)


def _matrix_of(obj) -> ExchangeMatrix:
    return obj.matrix if isinstance(obj, LabeledSeed) else obj


def is_sink(seed, k: int) -> bool:
    """Column k of B is nonnegative: every arrow at k points into k."""
    return all(v >= 0 for v in _matrix_of(seed).column(k))


def is_source(seed, k: int) -> bool:
    return all(v <= 0 for v in _matrix_of(seed).column(k))


def is_sink_source_path(root, path: Sequence[int]) -> bool:
    B = _matrix_of(root)
    for k in check_path(path, B.n):
        if not (is_sink(B, k) or is_source(B, k)):
            return False
        B = mutate_matrix(B, k)
    return True


def _same_pattern(a: LabeledSeed, b: LabeledSeed) -> None:
    if a.n != b.n:
        raise PatternMismatch("seeds of different rank")
    if a.pattern is not None and b.pattern is not None and a.pattern != b.pattern:
        raise PatternMismatch("seeds belong to different cluster patterns")


def seeds_equal_labeled(a: LabeledSeed, b: LabeledSeed) -> bool:
    _same_pattern(a, b)
    return a.matrix == b.matrix and a.cluster == b.cluster


def clusters_equal_up_to_perm(a: LabeledSeed, b: LabeledSeed) -> Optional[Perm]:
    """Return sigma with permute_seed(sigma, a) == b (cluster and matrix), else None."""
    _same_pattern(a, b)
    where = {x: i for i, x in enumerate(b.cluster)}
    if len(where) != b.n:
        return None
    sigma = []
    for x in a.cluster:
        j = where.get(x)
        if j is None:
            return None
        sigma.append(j)
    sigma = tuple(sigma)
    if len(set(sigma)) != a.n or permute_matrix(sigma, a.matrix) != b.matrix:
        return None
    return sigma


@dataclass(frozen=True)
class VertexState:
    """Cheap data attached to a vertex of the exchange tree."""

    matrix: ExchangeMatrix
    cmatrix: tuple[tuple[int, ...], ...]
    fingerprint: tuple[int, ...]


class ClusterPattern:
    """The cluster pattern grown from one root seed, with per-path caches.

    Laurent clusters are computed lazily and memoised by path; the
    exchange matrix, C-matrix and a mod-p evaluation of every cluster
    variable at a fixed random point are cached separately since they are
    cheap and drive most searches.
    """

    def __init__(self, B: ExchangeMatrix, point_seed: int = 20240917):
        self.B = B
        self.n = B.n
        self.id = next(_pattern_ids)
        rng = random.Random(point_seed)
        self.point = tuple(rng.randrange(2, FINGERPRINT_PRIME - 1) for _ in range(self.n))
        ident = tuple(tuple(int(i == j) for j in range(self.n)) for i in range(self.n))
        self._states: dict[TreePath, VertexState] = {(): VertexState(B, ident, self.point)}
        self._clusters: dict[TreePath, tuple[LaurentPoly, ...]] = {(): variables(self.n)}
        self._lock = threading.RLock()

    @property
    def root(self) -> LabeledSeed:
        return root_seed(self.B, with_cmatrix=True, pattern=self.id)

    def check(self, path: Sequence[int]) -> TreePath:
        return check_path(path, self.n)

    # cheap vertex data

    def state(self, path: TreePath) -> VertexState:
        st = self._states.get(path)
        if st is not None:
            return st
        i = len(path)
        while path[:i] not in self._states:
            i -= 1
        st = self._states[path[:i]]
        with self._lock:
            for j in range(i, len(path)):
                st = self._step(st, path[j])
                self._states[path[: j + 1]] = st
        return st

    def _step(self, st: VertexState, k: int) -> VertexState:
        B = st.matrix
        p = FINGERPRINT_PRIME
        plus = minus = 1
        col = B.column(k)
        for j, b in enumerate(col):
            if b > 0:
                plus = plus * pow(st.fingerprint[j], b, p) % p
            elif b < 0:
                minus = minus * pow(st.fingerprint[j], -b, p) % p
        old = st.fingerprint[k - 1]
        if old == 0:
            raise ArithmeticError("fingerprint hit zero; choose another evaluation point")
        new = (plus + minus) * pow(old, -1, p) % p
        fp = st.fingerprint[: k - 1] + (new,) + st.fingerprint[k:]
        return VertexState(mutate_matrix(B, k), mutate_cmatrix(st.cmatrix, B, k), fp)

    def matrix(self, path: TreePath) -> ExchangeMatrix:
        return self.state(path).matrix

    def cmatrix(self, path: TreePath) -> tuple[tuple[int, ...], ...]:
        return self.state(path).cmatrix

    def fingerprint(self, path: TreePath) -> tuple[int, ...]:
        return self.state(path).fingerprint

    def matrices_along(self, path: TreePath) -> list[ExchangeMatrix]:
        """Matrices at every vertex of the path, endpoints included."""
        return [self.matrix(path[:i]) for i in range(len(path) + 1)]

    # exact data

    def cluster(self, path: TreePath) -> tuple[LaurentPoly, ...]:
        cl = self._clusters.get(path)
        if cl is not None:
            return cl
        i = len(path)
        while path[:i] not in self._clusters:
            i -= 1
        cl = self._clusters[path[:i]]
        with self._lock:
            for j in range(i, len(path)):
                k = path[j]
                B = self.matrix(path[:j])
                new_var = exact_div(_exchange_binomial(cl, B, k), cl[k - 1])
                cl = cl[: k - 1] + (new_var,) + cl[k:]
                self._clusters[path[: j + 1]] = cl
        return cl

    def seed(self, path: Sequence[int]) -> LabeledSeed:
        path = self.check(path)
        st = self.state(path)
        return LabeledSeed(self.cluster(path), st.matrix, st.cmatrix, path, self.id)

    def clear_clusters(self) -> None:
        with self._lock:
            self._clusters = {(): variables(self.n)}

    def identity_perm(self) -> Perm:
        return identity(self.n)
