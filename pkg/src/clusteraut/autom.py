"""Cluster automorphisms as quadruples over a fixed root seed.

An :class:`AutQuad` ``(path, sigma, sign)`` stands for the automorphism
sending the root cluster variable x_i to x_{sigma(i); t}, where t is the
vertex reached from the root along ``path``.  It is valid when
sigma(B_root) = sign * B_t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .errors import InvalidAut, PatternMismatch
from .exmatrix import ExchangeMatrix, isomorphisms, permute_matrix
from .laurent import LaurentPoly, variables
from .perms import Perm, compose as perm_compose, from_images, identity, inverse as perm_inverse, relabel, to_cycles, to_images
from .seeds import ClusterPattern, TreePath, paper_subscript, reduce_path


@dataclass(frozen=True)
class AutQuad:
    pattern: ClusterPattern = field(compare=False, repr=False)
    path: TreePath
    sigma: Perm
    sign: int

    @property
    def n(self) -> int:
        return self.pattern.n

    def images(self) -> tuple[LaurentPoly, ...]:
        """(f(x_1), ..., f(x_n)) computed along the full path."""
        cluster = self.pattern.cluster(self.path)
        return tuple(cluster[j] for j in self.sigma)

    def fingerprint(self) -> tuple[int, ...]:
        fp = self.pattern.fingerprint(self.path)
        return tuple(fp[j] for j in self.sigma)

    def ckey(self) -> tuple[tuple[int, ...], ...]:
        """c-vectors of the image variables; the identity has the unit columns."""
        C = self.pattern.cmatrix(self.path)
        return tuple(tuple(row[j] for row in C) for j in self.sigma)

    def key(self, use_cmatrix: bool = True) -> tuple:
        """Staged element key: C-matrix data (optional) plus the numeric fingerprint."""
        return (self.ckey() if use_cmatrix else None, self.fingerprint())

    def label(self) -> str:
        s = "+" if self.sign > 0 else "-"
        cycles = to_cycles(self.sigma)
        if cycles == "()":
            cycles = "1"
        if not self.path:
            return f"psi^{s}_{cycles}"
        return f"g^{{{cycles},{s}}}_{{{paper_subscript(self.path)}}}"

    def __str__(self) -> str:
        return f"AutQuad(path={list(self.path)}, sigma={to_images(self.sigma)}, sign={'+' if self.sign > 0 else '-'})"


def _same(f: AutQuad, g: AutQuad) -> None:
    if f.pattern is not g.pattern:
        raise PatternMismatch("automorphisms over different roots are not comparable")


def is_valid(pattern: ClusterPattern, path: TreePath, sigma: Perm, sign: int) -> bool:
    Bt = pattern.matrix(path)
    target = Bt if sign > 0 else -Bt
    return permute_matrix(sigma, pattern.B) == target


def make_aut(pattern: ClusterPattern, path: Sequence[int], sigma: Perm | Sequence[int], sign: int | str) -> AutQuad:
    """Build and validate a quadruple.

    ``sigma`` is a 0-based :data:`Perm` tuple (see :mod:`perms` for
    conversions); ``sign`` is ``+1``/``-1`` or ``"+"``/``"-"``.
    """
    path = pattern.check(path)
    sign = _sign(sign)
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(pattern.n)):
        raise InvalidAut(f"sigma {sigma} is not a permutation of 0..{pattern.n - 1}")
    if not is_valid(pattern, path, sigma, sign):
        raise InvalidAut(
            f"sigma(B_root) != {'+' if sign > 0 else '-'}B_t for path {list(path)}, sigma {to_images(sigma)}"
        )
    return AutQuad(pattern, path, sigma, sign)


def _sign(sign: int | str) -> int:
    if sign in (1, "+", "+1"):
        return 1
    if sign in (-1, "-", "-1"):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def identity_aut(pattern: ClusterPattern) -> AutQuad:
    return AutQuad(pattern, (), identity(pattern.n), 1)


def compose(g: AutQuad, f: AutQuad) -> AutQuad:
    """g after f: (path_g ++ tau(path_f), tau sigma, delta eps)."""
    _same(g, f)
    path = reduce_path(g.path + relabel(g.sigma, f.path))
    return AutQuad(f.pattern, path, perm_compose(g.sigma, f.sigma), g.sign * f.sign)


def inverse(f: AutQuad) -> AutQuad:
    inv = perm_inverse(f.sigma)
    return AutQuad(f.pattern, reduce_path(relabel(inv, reversed(f.path))), inv, f.sign)


def power(f: AutQuad, k: int) -> AutQuad:
    base = f if k >= 0 else inverse(f)
    acc = identity_aut(f.pattern)
    for _ in range(abs(k)):
        acc = compose(acc, base)
    return acc


def factor_through(f: AutQuad, g: AutQuad) -> AutQuad:
    """The h with f = g o h, i.e. g^-1 o f."""
    _same(f, g)
    return compose(inverse(g), f)


def maybe_identity(f: AutQuad, use_cmatrix: bool = False) -> bool:
    """Cheap necessary test for the identity.

    Comparing values at a random point mod p is exact arithmetic, so a
    mismatch proves f is not the identity.  The optional C-matrix test relies
    on the c-vector characterisation of seeds and is checked separately.
    """
    if f.fingerprint() != f.pattern.point:
        return False
    if use_cmatrix:
        n = f.n
        if f.ckey() != tuple(tuple(int(i == j) for i in range(n)) for j in range(n)):
            return False
    return True


def _identity_laurent(f: AutQuad) -> bool:
    """Exact test: compare the seed halfway along the path with the seed
    reached from the other end, relabelled by sigma."""
    pattern = f.pattern
    path, sigma = f.path, f.sigma
    half = (len(path) + 1) // 2
    front, back = path[:half], path[half:]
    inv = perm_inverse(sigma)
    other = reduce_path(relabel(inv, reversed(back)))
    other_matrix = permute_matrix(sigma, pattern.matrix(other))
    if f.sign < 0:
        other_matrix = -other_matrix
    if pattern.matrix(front) != other_matrix:
        return False
    mid = pattern.cluster(front)
    far = pattern.cluster(other)
    return all(mid[j] == far[inv[j]] for j in range(f.n))


def is_identity(f: AutQuad, use_cmatrix: bool = False) -> bool:
    """Identity test with Laurent polynomials as the deciding oracle."""
    if not maybe_identity(f, use_cmatrix):
        return False
    return _identity_laurent(f)


def is_identity_by_images(f: AutQuad) -> bool:
    return f.images() == variables(f.n)


def aut_equal(f: AutQuad, g: AutQuad, use_cmatrix: bool = False) -> bool:
    _same(f, g)
    if f.path == g.path and f.sigma == g.sigma:
        return True
    return is_identity(compose(inverse(g), f), use_cmatrix)


def aut_equal_by_images(f: AutQuad, g: AutQuad) -> bool:
    _same(f, g)
    return f.images() == g.images()


def valid_choices(pattern: ClusterPattern, path: TreePath) -> list[tuple[Perm, int]]:
    """Every (sigma, sign) making a valid quadruple on this path.

    Ordered by the tie-break: lexicographically least sigma, then + before -.
    """
    Bt = pattern.matrix(path)
    found = [(s, 1) for s in isomorphisms(pattern.B, Bt, 1)]
    found += [(s, -1) for s in isomorphisms(pattern.B, Bt, -1)]
    found.sort(key=lambda c: (c[0], -c[1]))
    return found


def chosen_aut(pattern: ClusterPattern, path: Sequence[int]) -> Optional[AutQuad]:
    """The fixed representative f_{p(t0,t)} for a path, or None if t is not in the root class."""
    path = pattern.check(path)
    Bt = pattern.matrix(path)
    best: Optional[tuple[Perm, int]] = None
    for sign in (1, -1):
        first = next(isomorphisms(pattern.B, Bt, sign), None)
        if first is not None and (best is None or first < best[0]):
            best = (first, sign)
    if best is None:
        return None
    return AutQuad(pattern, path, best[0], best[1])


def aut_to_json(f: AutQuad, name: Optional[str] = None) -> dict:
    out = {
        "path": list(f.path),
        "paper_subscript": paper_subscript(f.path),
        "sigma": to_images(f.sigma),
        "sigma_cycles": to_cycles(f.sigma),
        "sign": "+" if f.sign > 0 else "-",
    }
    if name is not None:
        out = {"name": name, **out}
    return out


def aut_from_json(pattern: ClusterPattern, obj: dict) -> AutQuad:
    sigma = obj.get("sigma")
    if sigma is None:
        perm = identity(pattern.n)
    elif isinstance(sigma, str):
        from .perms import from_cycles

        perm = from_cycles(sigma, pattern.n)
    else:
        perm = from_images(sigma)
    return make_aut(pattern, obj.get("path", []), perm, obj.get("sign", "+"))


def iter_group_closure(gens: Sequence[AutQuad], limit: int = 100_000) -> Iterator[AutQuad]:
    """Enumerate the finite group generated by ``gens`` (fingerprint-keyed)."""
    if not gens:
        return
    seen = {}
    start = identity_aut(gens[0].pattern)
    queue = [start]
    seen[start.fingerprint()] = start
    yield start
    while queue:
        cur = queue.pop(0)
        for g in gens:
            nxt = compose(g, cur)
            key = nxt.fingerprint()
            if key not in seen:
                if len(seen) >= limit:
                    raise RuntimeError("group closure exceeded limit")
                seen[key] = nxt
                queue.append(nxt)
                yield nxt


__all__ = [
    "AutQuad",
    "ExchangeMatrix",
    "aut_equal",
    "aut_equal_by_images",
    "aut_from_json",
    "aut_to_json",
    "chosen_aut",
    "compose",
    "factor_through",
    "identity_aut",
    "inverse",
    "is_identity",
    "is_identity_by_images",
    "is_valid",
    "make_aut",
    "maybe_identity",
    "power",
    "valid_choices",
]
