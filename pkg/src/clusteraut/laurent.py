"""Sparse Laurent polynomials over the integers.

A polynomial is a map from exponent tuples (negative entries allowed) to
nonzero Python ints.  Values are never mutated after construction.
"""

from __future__ import annotations

import heapq
import re
from typing import Iterable, Mapping

from .errors import IntegerOverflow, NonExactDivision

Exp = tuple[int, ...]

_EXP_LIMIT = 2**63 - 1


def _add_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


class LaurentPoly:
    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exp, int] | None = None):
        self.n = n
        clean = {}
        if terms:
            for e, c in terms.items():
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not have {n} entries")
                if c:
                    clean[tuple(e)] = int(c)
        self.terms: dict[Exp, int] = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Exp, int]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, n: int, c: int) -> "LaurentPoly":
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def monomial(cls, exp: Iterable[int], c: int = 1) -> "LaurentPoly":
        exp = tuple(exp)
        return cls._raw(len(exp), {exp: c} if c else {})

    @classmethod
    def variable(cls, i: int, n: int) -> "LaurentPoly":
        """The variable x_i (1-based) in n variables."""
        if not 1 <= i <= n:
            raise ValueError(f"variable index {i} out of range 1..{n}")
        return cls.monomial(1 if j == i - 1 else 0 for j in range(n))

    # ring structure

    def _check(self, other: "LaurentPoly") -> None:
        if other.n != self.n:
            raise ValueError(f"mixing Laurent polynomials in {self.n} and {other.n} variables")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.n, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        if len(self.terms) > len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out: dict[Exp, int] = {}
        get = out.get
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    del out[e]
        return LaurentPoly._raw(self.n, out)

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            ((e, c),) = self.terms.items()
            if abs(c) != 1:
                raise ValueError("negative powers only for unit monomials")
            return LaurentPoly.monomial((x * k for x in e), c**k if k % 2 == 0 else c)
        result = LaurentPoly.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, tuple(sorted(self.terms.items()))))
        return self._hash

    def __len__(self) -> int:
        return len(self.terms)

    def min_exponents(self) -> Exp:
        return tuple(min(e[i] for e in self.terms) for i in range(self.n))

    def shift(self, exp: Exp) -> "LaurentPoly":
        """Multiply by the monomial x^exp."""
        for e in self.terms:
            for x, y in zip(e, exp):
                if abs(x + y) > _EXP_LIMIT:
                    raise IntegerOverflow("Laurent exponent exceeds 64-bit range")
        return LaurentPoly._raw(self.n, {_add_exp(e, exp): c for e, c in self.terms.items()})

    def evaluate_mod(self, values: Iterable[int], p: int) -> int:
        vals = list(values)
        total = 0
        for e, c in self.terms.items():
            t = c % p
            for v, k in zip(vals, e):
                if k:
                    t = t * pow(v, k, p) % p
            total += t
        return total % p

    # text form

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for e in sorted(self.terms):
            factors = [f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k]
            c = self.terms[e]
            if factors and c in (1, -1):
                factors[0] = ("-" if c < 0 else "") + factors[0]
                out.append(" * ".join(factors))
            else:
                out.append(" * ".join([str(c)] + factors))
        return " + ".join(out)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    @classmethod
    def parse(cls, text: str, n: int) -> "LaurentPoly":
        """Inverse of ``str``; also accepts ``-`` between terms and bare factors."""
        text = text.strip()
        if text == "0":
            return cls(n)
        text = re.sub(r"(?<=[\w)])\s*-\s*(?=[\dx])", " + -", text)
        terms: dict[Exp, int] = {}
        for chunk in text.split(" + "):
            tokens = [t for t in re.split(r"[\s*]+", chunk.strip()) if t]
            coeff = 1
            exp = [0] * n
            for tok in tokens:
                m = re.fullmatch(r"(-?)x(\d+)(?:\^(-?\d+))?", tok)
                if m:
                    i = int(m.group(2)) - 1
                    if not 0 <= i < n:
                        raise ValueError(f"variable {tok} out of range for n={n}")
                    exp[i] += int(m.group(3) or 1)
                    if m.group(1):
                        coeff = -coeff
                elif re.fullmatch(r"-?\d+", tok):
                    coeff *= int(tok)
                else:
                    raise ValueError(f"cannot parse Laurent term {chunk!r}")
            e = tuple(exp)
            v = terms.get(e, 0) + coeff
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return cls._raw(n, terms)


def variables(n: int) -> tuple[LaurentPoly, ...]:
    return tuple(LaurentPoly.variable(i, n) for i in range(1, n + 1))


def add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p + q


def mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p * q


def negate(p: LaurentPoly) -> LaurentPoly:
    return -p


def variable(i: int, n: int) -> LaurentPoly:
    return LaurentPoly.variable(i, n)


def exact_div(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Return r with q * r == p, raising NonExactDivision otherwise.

    Both sides are first cleared by their minimal monomials; the remaining
    polynomial quotient is then found by lexicographic long division.
    """
    p._check(q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    if p.is_zero():
        return LaurentPoly(p.n)
    n = p.n
    if q.is_monomial():
        ((eq, cq),) = q.terms.items()
        out = {}
        for e, c in p.terms.items():
            if c % cq:
                raise NonExactDivision(f"coefficient {c} not divisible by {cq}")
            out[tuple(x - y for x, y in zip(e, eq))] = c // cq
        return LaurentPoly._raw(n, out)

    mp = p.min_exponents()
    mq = q.min_exponents()
    rem = {tuple(x - y for x, y in zip(e, mp)): c for e, c in p.terms.items()}
    div = [(tuple(x - y for x, y in zip(e, mq)), c) for e, c in q.terms.items()]
    lead_e, lead_c = max(div)
    rest = [(e, c) for e, c in div if e != lead_e]

    heap = [tuple(-x for x in e) for e in rem]
    heapq.heapify(heap)
    quotient: dict[Exp, int] = {}
    while rem:
        top = tuple(-x for x in heapq.heappop(heap))
        c = rem.get(top)
        if c is None:
            continue
        qe = tuple(x - y for x, y in zip(top, lead_e))
        if min(qe) < 0 or c % lead_c:
            raise NonExactDivision("polynomial long division left a remainder")
        qc = c // lead_c
        quotient[qe] = qc
        del rem[top]
        for e, cc in rest:
            key = tuple(x + y for x, y in zip(qe, e))
            v = rem.get(key)
            if v is None:
                rem[key] = -qc * cc
                heapq.heappush(heap, tuple(-x for x in key))
            else:
                v -= qc * cc
                if v:
                    rem[key] = v
                else:
                    del rem[key]
    shift = tuple(x - y for x, y in zip(mp, mq))
    return LaurentPoly._raw(n, {_add_exp(e, shift): c for e, c in quotient.items()})
