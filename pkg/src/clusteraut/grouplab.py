"""Word-level tools over a set of named automorphisms.

Ball enumeration keys each group element by the values of its images at
the pattern's random point modulo a large prime (optionally together with
the c-vectors).  Distinct keys prove distinct elements; every relation that
is reported is confirmed with Laurent polynomials.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .autom import AutQuad, aut_equal, aut_from_json, chosen_aut, compose, identity_aut, inverse, is_identity, maybe_identity
from .errors import InvalidAut, ResourceBound, WordSyntaxError
from .parallel import ordered_map
from .seeds import ClusterPattern
from .words import (
    Letter,
    Word,
    canonical_relator,
    format_word,
    free_reduce,
    inverse_word,
    parse_relation,
    parse_word,
    power_word,
    shortlex_key,
)


def _pattern_of(gens: Mapping[str, AutQuad], pattern: Optional[ClusterPattern]) -> ClusterPattern:
    if pattern is not None:
        return pattern
    for g in gens.values():
        return g.pattern
    raise ValueError("cannot evaluate without a generator or a pattern")


def evaluate(word: Sequence[Letter] | str, gens: Mapping[str, AutQuad], pattern: Optional[ClusterPattern] = None) -> AutQuad:
    """Compose the letters from right to left; the empty word is the identity."""
    if isinstance(word, str):
        word = parse_word(word)
    acc = identity_aut(_pattern_of(gens, pattern))
    inverses: dict[str, AutQuad] = {}
    for name, e in word:
        if name not in gens:
            raise WordSyntaxError(f"unknown generator {name!r}")
        if e > 0:
            g = gens[name]
        else:
            g = inverses.get(name)
            if g is None:
                g = inverses[name] = inverse(gens[name])
        acc = compose(acc, g)
    return acc


def _key(f: AutQuad, use_cmatrix: bool) -> tuple:
    return f.key(use_cmatrix)


# orders and verification


@dataclass
class OrderResult:
    order: Optional[int]
    bound: int

    def __str__(self) -> str:
        return f"order {self.order}" if self.order is not None else f"order > {self.bound}"

    def to_json(self) -> dict:
        return {"order": self.order, "bound": self.bound, "text": str(self)}


def order_bound(f: AutQuad, max_pow: int, use_cmatrix: bool = False) -> OrderResult:
    """Smallest k <= max_pow with f^k the identity, else the marker 'order > max_pow'."""
    if max_pow < 1:
        raise ValueError("max_pow must be at least 1")
    acc = f
    for k in range(1, max_pow + 1):
        if maybe_identity(acc, use_cmatrix) and is_identity(acc, use_cmatrix):
            return OrderResult(k, max_pow)
        acc = compose(acc, f)
    return OrderResult(None, max_pow)


@dataclass
class RelationCheck:
    text: str
    lhs: Word
    rhs: Word
    holds: bool

    def to_json(self) -> dict:
        return {"relation": self.text, "lhs": format_word(self.lhs), "rhs": format_word(self.rhs), "holds": self.holds}


def verify_relations(
    gens: Mapping[str, AutQuad],
    relations: Sequence[str | tuple[Word, Word]],
    use_cmatrix: bool = False,
    threads: Optional[int] = None,
    pattern: Optional[ClusterPattern] = None,
) -> list[RelationCheck]:
    """Evaluate both sides of each relation and compare them as maps."""
    parsed = []
    for rel in relations:
        if isinstance(rel, str):
            lhs, rhs = parse_relation(rel)
            parsed.append((rel.strip(), lhs, rhs))
        else:
            lhs, rhs = rel
            parsed.append((f"{format_word(lhs)} = {format_word(rhs)}", tuple(lhs), tuple(rhs)))
    pat = _pattern_of(gens, pattern)

    def check(item):
        text, lhs, rhs = item
        holds = aut_equal(evaluate(lhs, gens, pat), evaluate(rhs, gens, pat), use_cmatrix)
        return RelationCheck(text, lhs, rhs, holds)

    return ordered_map(check, parsed, threads)


# ball enumeration


def _alphabet(gens: Mapping[str, AutQuad], use_cmatrix: bool) -> tuple[list[Letter], frozenset[str], list[str]]:
    letters: list[Letter] = []
    involutions = set()
    trivial = []
    for name, g in gens.items():
        if is_identity(g, use_cmatrix):
            trivial.append(name)
            continue
        if is_identity(compose(g, g), use_cmatrix):
            involutions.add(name)
            letters.append((name, 1))
        else:
            letters.extend([(name, 1), (name, -1)])
    return letters, frozenset(involutions), trivial


def _inv_letter(letter: Letter, involutions: frozenset[str]) -> Letter:
    return letter if letter[0] in involutions else (letter[0], -letter[1])


@dataclass
class _Ball:
    words: list[Word]
    elems: list[AutQuad]
    level: list[int]
    index: dict[tuple, int]
    nbr: dict[tuple[int, Letter], int]
    growth: list[int]
    closed: bool
    collisions: list[tuple[int, Letter, int]]


def _grow_ball(
    gens: Mapping[str, AutQuad],
    letters: Sequence[Letter],
    involutions: frozenset[str],
    radius: int,
    use_cmatrix: bool,
    cap: int,
    pattern: ClusterPattern,
    stop_key: Optional[tuple] = None,
) -> _Ball:
    letter_aut = {}
    for name, e in letters:
        letter_aut[(name, e)] = gens[name] if e > 0 else inverse(gens[name])
    start = identity_aut(pattern)
    words: list[Word] = [()]
    elems = [start]
    level = [0]
    index = {_key(start, use_cmatrix): 0}
    nbr: dict[tuple[int, Letter], int] = {}
    collisions = []
    growth = [1]
    frontier = [0]
    closed = False
    for r in range(1, radius + 1):
        nxt = []
        for v in frontier:
            last = words[v][-1] if words[v] else None
            for letter in letters:
                if last is not None and letter == _inv_letter(last, involutions):
                    continue
                if (v, letter) in nbr:
                    continue
                f = compose(elems[v], letter_aut[letter])
                key = _key(f, use_cmatrix)
                u = index.get(key)
                if u is None:
                    if len(elems) >= cap:
                        raise ResourceBound(f"ball exceeded {cap} elements at radius {r}")
                    u = len(elems)
                    index[key] = u
                    words.append(words[v] + (letter,))
                    elems.append(f)
                    level.append(r)
                    nxt.append(u)
                    if stop_key is not None and key == stop_key:
                        nbr[(v, letter)] = u
                        nbr[(u, _inv_letter(letter, involutions))] = v
                        growth.append(len(elems))
                        return _Ball(words, elems, level, index, nbr, growth, False, collisions)
                else:
                    collisions.append((v, letter, u))
                nbr[(v, letter)] = u
                nbr[(u, _inv_letter(letter, involutions))] = v
        growth.append(len(elems))
        frontier = nxt
        if not nxt:
            closed = True
            break
    return _Ball(words, elems, level, index, nbr, growth, closed, collisions)


def _edge_id(v: int, letter: Letter, u: int, involutions: frozenset[str]) -> tuple[tuple, int]:
    name, e = letter
    if name in involutions:
        return ((min(u, v), name), 1 if v < u else -1)
    if e > 0:
        return ((v, name), 1)
    return ((u, name), -1)


@dataclass
class RelationReport:
    generators: list[str]
    involutions: list[str]
    trivial: list[str]
    radius: int
    growth: list[int]
    closed: bool
    relations: list[dict]
    redundant: int
    orders: dict[str, OrderResult] = field(default_factory=dict)
    label: str = ""

    def to_json(self) -> dict:
        return {
            "generators": self.generators,
            "involutions": self.involutions,
            "trivial_generators": self.trivial,
            "max_len": self.radius,
            "ball_growth": self.growth,
            "sphere_sizes": [b - a for a, b in zip([0] + self.growth[:-1], self.growth)],
            "closed": self.closed,
            "group_order": self.growth[-1] if self.closed else None,
            "relations": self.relations,
            "redundant_collisions": self.redundant,
            "orders": {k: v.to_json() for k, v in self.orders.items()},
            "consistent_with": self.label,
        }

    def relators(self) -> list[str]:
        return [r["relator"] for r in self.relations]

    def text(self) -> str:
        lines = [f"generators: {' '.join(self.generators)}"]
        if self.involutions:
            lines.append(f"involutions: {' '.join(self.involutions)}")
        lines.append(f"ball sizes up to radius {self.radius}: {self.growth}" + (" (closed)" if self.closed else ""))
        for r in self.relations:
            lines.append(f"  {r['relation']}    [{r['relator']} = id]")
        lines.append(f"redundant collisions: {self.redundant}")
        for name, o in self.orders.items():
            lines.append(f"  {name}: {o}")
        if self.label:
            lines.append(f"consistent with: {self.label}")
        return "\n".join(lines)


class _Filling:
    """Cycle-space bookkeeping for the redundancy test.

    Each non-tree edge of the ball is a coordinate of the cycle space.  A
    candidate relation is its edge's fundamental cycle; it is redundant when
    that edge is forced by 2-cells (translates of accepted relators inside
    the ball).  Forcing is propagated one unknown at a time.
    """

    def __init__(self, ball: _Ball, involutions: frozenset[str], tree: set):
        self.ball = ball
        self.inv = involutions
        self.tree = tree
        self.known: set = set()
        self.cells: list[dict] = []
        self.unknown: list[int] = []
        self.by_edge: dict = defaultdict(list)

    def _cell_at(self, v: int, relator: Word) -> Optional[dict]:
        coef: dict = {}
        cur = v
        for letter in relator:
            u = self.ball.nbr.get((cur, letter))
            if u is None:
                return None
            eid, sgn = _edge_id(cur, letter, u, self.inv)
            if eid not in self.tree:
                c = coef.get(eid, 0) + sgn
                if c:
                    coef[eid] = c
                else:
                    del coef[eid]
            cur = u
        return coef if cur == v else None

    def mark(self, eid) -> None:
        queue = [eid]
        while queue:
            e = queue.pop()
            if e in self.known:
                continue
            self.known.add(e)
            for ci in self.by_edge.get(e, ()):
                self.unknown[ci] -= 1
                if self.unknown[ci] == 1:
                    rest = [x for x in self.cells[ci] if x not in self.known]
                    if rest:
                        queue.append(rest[0])

    def add_relator(self, relator: Word) -> None:
        for v in range(len(self.ball.elems)):
            cell = self._cell_at(v, relator)
            if not cell:
                continue
            todo = [e for e in cell if e not in self.known]
            if not todo:
                continue
            if len(todo) == 1:
                self.mark(todo[0])
                continue
            ci = len(self.cells)
            self.cells.append(cell)
            self.unknown.append(len(todo))
            for e in todo:
                self.by_edge[e].append(ci)


def _signature_label(report: RelationReport) -> str:
    if report.closed:
        return f"finite group of order {report.growth[-1]}"
    gens = report.generators
    rels = report.relators()
    if len(gens) == 1 and not rels:
        return "Z (free cyclic; no relation found)"
    if len(gens) == 2 and len(report.involutions) == 1 and len(rels) == 2:
        y = report.involutions[0]
        x = gens[0] if gens[1] == y else gens[1]
        if set(rels) == {f"{y}^2", format_word(canonical_relator(parse_word(f"{x} {y} {x} {y}"), frozenset({y})))}:
            return "D_infinity = <x, y | y^2, x y = y x^-1>"
    return "no standard label"


def relation_search(
    gens: Mapping[str, AutQuad],
    max_len: int,
    cap: int = 1_000_000,
    use_cmatrix: bool = False,
    verify: bool = True,
    order_pow: Optional[int] = None,
    pattern: Optional[ClusterPattern] = None,
) -> RelationReport:
    """Breadth-first ball of radius ``max_len`` with relation discovery.

    Words are freely reduced over the generators and their inverses
    (involutions are self-inverse letters).  The first word reaching an
    element defines a spanning tree; every other edge of the ball closes a
    relation of total length at most 2*max_len + 1.  Relations are
    considered in shortlex order of their canonical relator and kept only
    when not already forced by the kept ones.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    pat = _pattern_of(gens, pattern)
    letters, involutions, trivial = _alphabet(gens, use_cmatrix)
    ball = _grow_ball(gens, letters, involutions, max_len, use_cmatrix, cap, pat)

    tree = set()
    # recover parents from the nbr table: the tree edge into u uses its last letter
    parent_of = {}
    for u in range(1, len(ball.words)):
        last = ball.words[u][-1]
        parent_of[u] = ball.nbr[(u, _inv_letter(last, involutions))]
        tree.add(_edge_id(parent_of[u], last, u, involutions)[0])

    candidates = {}
    for v, letter, u in ball.collisions:
        eid, _ = _edge_id(v, letter, u, involutions)
        if eid in tree or eid in candidates:
            continue
        lhs = ball.words[v] + (letter,)
        rhs = ball.words[u]
        rel = canonical_relator(lhs + inverse_word(rhs), involutions)
        candidates[eid] = (rel, lhs, rhs, v, letter, u)
    order = sorted(candidates, key=lambda e: (shortlex_key(candidates[e][0]), candidates[e][1:3]))

    filling = _Filling(ball, involutions, tree)
    relations = []
    for name in sorted(involutions, key=list(gens).index):
        relations.append(
            {
                "relator": f"{name}^2",
                "relation": f"{name}^2 = id",
                "length": 2,
                "verified": True,
            }
        )
    redundant = 0
    accepted_relators: set[Word] = set()
    for eid in order:
        rel, lhs, rhs, v, letter, u = candidates[eid]
        if eid in filling.known:
            redundant += 1
            continue
        if not rel:
            filling.mark(eid)
            redundant += 1
            continue
        ok = True
        if verify:
            f = compose(ball.elems[v], gens[letter[0]] if letter[1] > 0 else inverse(gens[letter[0]]))
            ok = aut_equal(f, ball.elems[u], use_cmatrix)
            if not ok:
                raise RuntimeError(f"fingerprint collision without equality for {format_word(lhs)} vs {format_word(rhs)}")
        if rel in accepted_relators:
            filling.mark(eid)
            redundant += 1
            continue
        accepted_relators.add(rel)
        relations.append(
            {
                "relator": format_word(rel),
                "relation": _relation_text(lhs, rhs),
                "length": len(rel),
                "verified": ok if verify else None,
            }
        )
        filling.mark(eid)
        filling.add_relator(rel)
    report = RelationReport(
        list(gens), sorted(involutions, key=list(gens).index), trivial, max_len, ball.growth, ball.closed, relations, redundant
    )
    pow_bound = order_pow if order_pow is not None else 2 * max_len
    for name in gens:
        if name in trivial:
            report.orders[name] = OrderResult(1, pow_bound)
        elif name in involutions:
            report.orders[name] = OrderResult(2, pow_bound)
        else:
            report.orders[name] = order_bound(gens[name], pow_bound, use_cmatrix)
    report.label = _signature_label(report)
    return report


def _relation_text(lhs: Word, rhs: Word) -> str:
    # drop a common prefix, which only conjugates the relation
    i = 0
    while i < min(len(lhs), len(rhs)) and lhs[i] == rhs[i]:
        i += 1
    return f"{format_word(lhs[i:])} = {format_word(rhs[i:])}"


# generator pruning


def find_word(
    target: AutQuad,
    gens: Mapping[str, AutQuad],
    radius: int,
    use_cmatrix: bool = False,
    cap: int = 1_000_000,
) -> Optional[Word]:
    """A shortest word over ``gens`` (and inverses) evaluating to target, within the radius."""
    pat = target.pattern
    key = _key(target, use_cmatrix)
    if maybe_identity(target) and is_identity(target):
        return ()
    if not gens:
        return None
    letters, involutions, _ = _alphabet(gens, use_cmatrix)
    if not letters:
        return None
    ball = _grow_ball(gens, letters, involutions, radius, use_cmatrix, cap, pat, stop_key=key)
    u = ball.index.get(key)
    if u is None:
        return None
    word = ball.words[u]
    if not aut_equal(evaluate(word, gens, pat), target, use_cmatrix):
        return None
    return word


def prune_generators(
    gens: Mapping[str, AutQuad], radius: int = 4, use_cmatrix: bool = False
) -> tuple[list[str], dict[str, str]]:
    """Greedily drop generators expressible by the others (later names first).

    Returns the kept names and, for each dropped name, a word in the kept
    generators that evaluates to it.
    """
    kept = list(gens)
    dropped: dict[str, Word] = {}
    for name in reversed(list(gens)):
        others = {k: gens[k] for k in kept if k != name}
        word = find_word(gens[name], others, radius, use_cmatrix)
        if word is not None:
            kept.remove(name)
            dropped[name] = word
    # rewrite dropped generators in terms of the final kept set
    final: dict[str, str] = {}
    kept_set = set(kept)

    def expand(word: Word, depth: int = 0) -> Word:
        out: list[Letter] = []
        for n, e in word:
            if n in kept_set:
                out.append((n, e))
            else:
                sub = expand(dropped[n], depth + 1)
                out.extend(sub if e > 0 else inverse_word(sub))
        return free_reduce(out)

    for name in gens:
        if name in dropped:
            final[name] = format_word(expand(dropped[name]))
    return kept, final


# bounded quotient balls of abstract presentations


def quotient_ball_sizes(
    letters_of: Sequence[str],
    involutions: Sequence[str],
    relators: Sequence[Word | str],
    radius: int,
    margin: int = 4,
) -> list[int]:
    """Upper bounds for ball sizes of <letters | relators> at radius 0..radius.

    Reduced words up to radius + margin are identified by relator loops and
    closed under right multiplication.  Identifications needing longer words
    are missed, so every number returned is at least the true ball size; a
    match with the ball of a concrete group therefore shows that all of its
    relations in that ball follow from ``relators``.
    """
    inv = frozenset(involutions)
    letters: list[Letter] = []
    for name in letters_of:
        letters.append((name, 1))
        if name not in inv:
            letters.append((name, -1))
    rels = []
    for r in relators:
        w = parse_word(r) if isinstance(r, str) else tuple(r)
        w = free_reduce(w, inv)
        for cand in (w, free_reduce(inverse_word(w), inv)):
            for i in range(len(cand)):
                rels.append(cand[i:] + cand[:i])
    R = radius + margin
    words: list[Word] = [()]
    length = [0]
    child: dict[tuple[int, Letter], int] = {}
    index = {(): 0}
    frontier = [0]
    for r in range(1, R + 1):
        nxt = []
        for v in frontier:
            last = words[v][-1] if words[v] else None
            for letter in letters:
                if last is not None and letter == _inv_letter(last, inv):
                    continue
                u = len(words)
                w = words[v] + (letter,)
                words.append(w)
                length.append(r)
                index[w] = u
                child[(v, letter)] = u
                child[(u, _inv_letter(letter, inv))] = v
                nxt.append(u)
        frontier = nxt

    parent = list(range(len(words)))
    # per class: letter -> some node reached by that letter
    edges: list[dict] = [dict() for _ in words]
    for (v, letter), u in child.items():
        edges[v].setdefault(letter, u)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending: list[tuple[int, int]] = []

    def union(a: int, b: int) -> None:
        pending.append((a, b))
        while pending:
            x, y = pending.pop()
            x, y = find(x), find(y)
            if x == y:
                continue
            if len(edges[x]) < len(edges[y]):
                x, y = y, x
            parent[y] = x
            ex = edges[x]
            for letter, t in edges[y].items():
                s = ex.get(letter)
                if s is None:
                    ex[letter] = t
                else:
                    pending.append((s, t))
            edges[y] = {}

    def walk(v: int, word: Word) -> Optional[int]:
        cur = v
        for letter in word:
            nxt = edges[find(cur)].get(letter)
            if nxt is None:
                return None
            cur = nxt
        return cur

    changed = True
    while changed:
        changed = False
        for v in range(len(words)):
            if find(v) != v:
                continue
            for rel in rels:
                end = walk(v, rel)
                if end is not None and find(end) != find(v):
                    union(v, end)
                    changed = True
    sizes = []
    for r in range(radius + 1):
        sizes.append(len({find(v) for v in range(len(words)) if length[v] <= r}))
    return sizes


# exploratory scan


def scan_x7_pattern(
    gens: Mapping[str, AutQuad], k_max: int = 3, exact: bool = False, a: str = "a", f: str = "f"
) -> list[dict]:
    """Observations on the words (a f^{2k})^k (a f^{-2k})^k for k <= k_max.

    The expected behaviour for k = 1, 5 mod 6 is that the cube of the word is
    trivial, otherwise the word itself.  Results are observations: without
    ``exact`` they rest on the modular fingerprint alone.
    """
    out = []
    for k in range(1, k_max + 1):
        left = power_word(((a, 1),) + power_word(((f, 1),), 2 * k), k)
        right = power_word(((a, 1),) + power_word(((f, 1),), -2 * k), k)
        word = left + right
        w = evaluate(word, gens)
        observed = None
        evidence = "fingerprint"
        acc = w
        for p in (1, 2, 3):
            if maybe_identity(acc):
                if exact:
                    if is_identity(acc):
                        observed, evidence = p, "laurent"
                        break
                else:
                    observed = p
                    break
            acc = compose(acc, w)
        expected = 3 if k % 6 in (1, 5) else 1
        out.append(
            {
                "k": k,
                "word": format_word(word),
                "word_length": len(word),
                "observed_order": observed,
                "observed_text": f"order {observed}" if observed else "order > 3",
                "expected_order": expected,
                "matches_expected": observed == expected,
                "evidence": evidence,
            }
        )
    return out


def load_relations_text(lines: Sequence[str]) -> list[str]:
    return [ln.strip() for ln in lines if ln.strip() and not ln.strip().startswith("#")]


def load_gens(pattern: ClusterPattern, obj: Mapping) -> dict[str, AutQuad]:
    """Named automorphisms from a generators document.

    Each entry of ``obj["gens"]`` is either a quadruple ``{"path", "sigma",
    "sign"}`` (sigma as 1-based images or a cycle string; leaving out sigma
    and sign picks the tie-break representative) or ``{"word": "..."}`` in
    previously listed names.
    """
    entries = obj.get("gens", obj)
    if not isinstance(entries, Mapping):
        raise ValueError('"gens" must map names to automorphisms')
    out: dict[str, AutQuad] = {}
    for name, spec in entries.items():
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in ("id", "e"):
            raise WordSyntaxError(f"bad generator name {name!r}")
        if "word" in spec:
            out[name] = evaluate(spec["word"], out, pattern)
        elif "sigma" not in spec and "sign" not in spec:
            f = chosen_aut(pattern, spec.get("path", []))
            if f is None:
                raise InvalidAut(f"path {spec.get('path')} does not end in the root class")
            out[name] = f
        else:
            out[name] = aut_from_json(pattern, spec)
    return out


__all__ = [
    "OrderResult",
    "RelationCheck",
    "RelationReport",
    "evaluate",
    "find_word",
    "load_gens",
    "load_relations_text",
    "order_bound",
    "prune_generators",
    "quotient_ball_sizes",
    "relation_search",
    "scan_x7_pattern",
    "verify_relations",
]
