"""Searches over the exchange tree: mutation classes, weight-2 return paths,
the class set met by those paths, generator extraction and the constructive
reduction of long automorphisms to the extracted generators.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .autom import (
    AutQuad,
    aut_equal,
    aut_to_json,
    chosen_aut,
    factor_through,
    identity_aut,
    is_identity,
    is_valid,
    valid_choices,
)
from .errors import IntegerOverflow, ModeUnavailable, NotFound, ReductionFailed, ResourceBound
from .exmatrix import ExchangeMatrix, class_key, is_acyclic, matrix_to_json, mutate_matrix
from .parallel import ordered_map
from .perms import to_images
from .seeds import ClusterPattern, TreePath, append_step, is_sink, is_source, paper_subscript
from .words import Word

MODES = ("finite-mutation", "acyclic-ss", "bounded")
_MODE_ALIASES = {
    "finitemutation": "finite-mutation",
    "finite-mutation": "finite-mutation",
    "finite": "finite-mutation",
    "acyclicsinksource": "acyclic-ss",
    "acyclic-ss": "acyclic-ss",
    "acyclic": "acyclic-ss",
    "bounded": "bounded",
}


def normalize_mode(mode: str) -> str:
    key = mode.replace("_", "-").lower()
    if key not in _MODE_ALIASES:
        key = key.replace("-", "")
    if key not in _MODE_ALIASES:
        raise ModeUnavailable(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    return _MODE_ALIASES[key]


def _ss_ok(B: ExchangeMatrix, k: int) -> bool:
    return is_sink(B, k) or is_source(B, k)


# mutation classes


@dataclass
class ClassIndex:
    root_key: bytes
    depth: dict[bytes, int]
    reps: dict[bytes, ExchangeMatrix]
    finite: bool
    max_depth: int
    max_classes: int
    sink_source_only: bool = False
    diagnostic: Optional[str] = None

    def __len__(self) -> int:
        return len(self.depth)

    def to_json(self) -> dict:
        return {
            "classes": len(self.depth),
            "finite": self.finite,
            "max_depth": self.max_depth,
            "max_classes": self.max_classes,
            "sink_source_only": self.sink_source_only,
            "depths": [self.depth[k] for k in self.depth],
            "representatives": [matrix_to_json(self.reps[k])["B"] for k in self.depth],
            "diagnostic": self.diagnostic,
        }


def class_distances(
    B0: ExchangeMatrix, max_depth: int = 10, max_classes: int = 100_000, sink_source_only: bool = False
) -> ClassIndex:
    """Breadth-first search on the graph of classes [B] = {+-sigma B}.

    The neighbours of a class do not depend on the chosen representative, so
    one labelled matrix per class suffices.  ``finite`` is set only when a
    full level produced no new class.
    """
    if max_depth < 0 or max_classes < 1:
        raise ValueError("bounds must be positive")
    root = class_key(B0)
    depth = {root: 0}
    reps = {root: B0}
    frontier = [root]
    d = 0
    diagnostic = None
    truncated = False
    while frontier:
        nxt = []
        for key in frontier:
            rep = reps[key]
            for k in range(1, rep.n + 1):
                if sink_source_only and not _ss_ok(rep, k):
                    continue
                try:
                    M = mutate_matrix(rep, k)
                except IntegerOverflow as exc:
                    truncated = True
                    diagnostic = f"integer overflow at depth {d + 1}: {exc}"
                    continue
                kk = class_key(M)
                if kk in depth:
                    continue
                if d >= max_depth:
                    truncated = True
                    diagnostic = diagnostic or f"depth bound {max_depth} reached with new classes beyond it"
                    continue
                if len(depth) >= max_classes:
                    truncated = True
                    diagnostic = diagnostic or f"class bound {max_classes} reached"
                    continue
                depth[kk] = d + 1
                reps[kk] = M
                nxt.append(kk)
        frontier = nxt
        d += 1
    return ClassIndex(root, depth, reps, not truncated, max_depth, max_classes, sink_source_only, diagnostic)


def enumerate_class(B0: ExchangeMatrix, max_depth: int = 10, max_classes: int = 100_000) -> ClassIndex:
    return class_distances(B0, max_depth, max_classes)


def path_weight(pattern: ClusterPattern, path: Sequence[int], ref_key: bytes) -> int:
    """Vertices of the path, both endpoints included, whose class key is ``ref_key``."""
    path = pattern.check(path)
    return sum(class_key(pattern.matrix(path[:i])) == ref_key for i in range(len(path) + 1))


def compute_G0(pattern: ClusterPattern) -> list[AutQuad]:
    return [AutQuad(pattern, (), s, e) for s, e in valid_choices(pattern, ())]


# weight-2 return paths


@dataclass
class GradedPathSet:
    m: int
    paths: list[TreePath]
    sink_source_only: bool
    max_len: int

    def __len__(self) -> int:
        return len(self.paths)


def _p1_subtree(B0: ExchangeMatrix, root_key: bytes, first: int, max_len: int, ss: bool) -> list[TreePath]:
    found = []
    stack = [((first,), mutate_matrix(B0, first))]
    while stack:
        path, M = stack.pop()
        if class_key(M) == root_key:
            found.append(path)
            continue
        if len(path) >= max_len:
            continue
        for k in range(M.n, 0, -1):
            if k == path[-1] or (ss and not _ss_ok(M, k)):
                continue
            stack.append((path + (k,), mutate_matrix(M, k)))
    return found


def enumerate_P1(
    pattern: ClusterPattern, max_len: int, sink_source_only: bool = False, threads: Optional[int] = None
) -> GradedPathSet:
    """All reduced paths of length <= max_len returning to the root class
    with no root-class vertex strictly inside."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    B0 = pattern.B
    root_key = class_key(B0)
    firsts = [k for k in range(1, B0.n + 1) if not sink_source_only or _ss_ok(B0, k)]
    parts = ordered_map(lambda k: _p1_subtree(B0, root_key, k, max_len, sink_source_only), firsts, threads)
    paths = sorted((p for part in parts for p in part), key=lambda p: (len(p), p))
    return GradedPathSet(1, paths, sink_source_only, max_len)


# the class set met by weight-2 return paths


@dataclass
class BSet:
    keys: list[bytes]
    complete: bool
    method: str
    witnesses: dict[bytes, TreePath] = field(default_factory=dict)
    reps: dict[bytes, ExchangeMatrix] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.keys)


def _bset_automaton(pattern: ClusterPattern, ss: bool, state_cap: int) -> BSet:
    """Exact computation on states (labelled matrix, last direction).

    A reduced path from the root corresponds to a walk in this finite graph
    when the mutation class (or, in sink-source mode, the set of
    orientations) is finite.  A class belongs to the set when one of its
    non-root states is reachable from the root through non-root states and
    can itself reach a root-class matrix the same way.
    """
    B0 = pattern.B
    root_key = class_key(B0)
    mut_cache: dict[tuple[ExchangeMatrix, int], ExchangeMatrix] = {}

    def mut(M: ExchangeMatrix, k: int) -> ExchangeMatrix:
        r = mut_cache.get((M, k))
        if r is None:
            r = mutate_matrix(M, k)
            mut_cache[(M, k)] = r
        return r

    State = tuple  # (matrix, last)
    prefix: dict[State, TreePath] = {}
    preds: dict[State, list[State]] = {}
    finishing: set[State] = set()
    queue: deque[State] = deque()
    for k in range(1, B0.n + 1):
        if ss and not _ss_ok(B0, k):
            continue
        M = mut(B0, k)
        if class_key(M) == root_key:
            continue
        st = (M, k)
        if st not in prefix:
            prefix[st] = (k,)
            preds[st] = []
            queue.append(st)
    while queue:
        st = queue.popleft()
        M, last = st
        for k in range(1, M.n + 1):
            if k == last or (ss and not _ss_ok(M, k)):
                continue
            M2 = mut(M, k)
            if class_key(M2) == root_key:
                finishing.add(st)
                continue
            nst = (M2, k)
            if nst not in prefix:
                if len(prefix) >= state_cap:
                    raise ResourceBound(f"more than {state_cap} labelled states; the class set is not certified finite")
                prefix[nst] = prefix[st] + (k,)
                preds[nst] = []
                queue.append(nst)
            preds[nst].append(st)
    good = set(finishing)
    stack = list(finishing)
    while stack:
        st = stack.pop()
        for p in preds[st]:
            if p not in good:
                good.add(p)
                stack.append(p)
    keys = [root_key]
    witnesses = {root_key: ()}
    reps = {root_key: B0}
    for st in sorted(good, key=lambda s: (len(prefix[s]), prefix[s])):
        key = class_key(st[0])
        if key not in witnesses:
            keys.append(key)
            witnesses[key] = prefix[st]
            reps[key] = st[0]
    return BSet(keys, True, "automaton", witnesses, reps)


def compute_B_set(
    pattern: ClusterPattern,
    max_len: Optional[int] = None,
    sink_source_only: bool = False,
    state_cap: int = 500_000,
) -> BSet:
    """Classes of vertices on weight-2 return paths.

    Without ``max_len`` the exact finite-state computation is used (raising
    ResourceBound if the state space does not close).  With ``max_len`` the
    union over paths of length <= max_len is returned as a lower bound.
    """
    if max_len is None:
        return _bset_automaton(pattern, sink_source_only, state_cap)
    root_key = class_key(pattern.B)
    keys = [root_key]
    witnesses: dict[bytes, TreePath] = {root_key: ()}
    reps = {root_key: pattern.B}
    for path in enumerate_P1(pattern, max_len, sink_source_only).paths:
        M = pattern.B
        for i, k in enumerate(path[:-1]):
            M = mutate_matrix(M, k)
            key = class_key(M)
            if key not in witnesses:
                keys.append(key)
                witnesses[key] = path[: i + 1]
                reps[key] = M
    return BSet(keys, False, f"paths<= {max_len}", witnesses, reps)


def find_sink_source_representative(pattern: ClusterPattern, target_key: bytes, max_len: int = 20) -> TreePath:
    """Shortest sink-source path from the root ending in the given class."""
    if not is_acyclic(pattern.B):
        raise ModeUnavailable("sink-source representatives need an acyclic root")
    if class_key(pattern.B) == target_key:
        return ()
    seen = {pattern.B}
    frontier: list[tuple[TreePath, ExchangeMatrix]] = [((), pattern.B)]
    for _ in range(max_len):
        nxt = []
        for path, M in frontier:
            for k in range(1, M.n + 1):
                if path and path[-1] == k or not _ss_ok(M, k):
                    continue
                M2 = mutate_matrix(M, k)
                if M2 in seen:
                    continue
                seen.add(M2)
                p2 = path + (k,)
                if class_key(M2) == target_key:
                    return p2
                nxt.append((p2, M2))
        frontier = nxt
        if not frontier:
            break
    raise NotFound(f"no sink-source path of length <= {max_len} reaches the requested class")


# generator extraction


@dataclass
class H1Entry:
    path: TreePath
    aut: AutQuad
    name: Optional[str]
    status: str  # "generator", "identity", "duplicate", "in-G0"
    equal_to: Optional[str] = None


@dataclass
class GeneratorSet:
    pattern: ClusterPattern
    mode: str
    G0: list[AutQuad]
    G0_names: list[Optional[str]]
    H1: list[H1Entry]
    bset: BSet
    l_values: dict[bytes, int]
    l: int
    max_len: int
    complete: bool
    class_count: Optional[int] = None
    notes: list[str] = field(default_factory=list)

    @property
    def gens(self) -> dict[str, AutQuad]:
        out = {name: g for name, g in zip(self.G0_names, self.G0) if name}
        out.update((e.name, e.aut) for e in self.H1 if e.status == "generator")
        return out

    @property
    def H1_count(self) -> int:
        return sum(e.status == "generator" for e in self.H1)

    def g0_name(self, sigma, sign) -> Optional[str]:
        for name, g in zip(self.G0_names, self.G0):
            if g.sigma == sigma and g.sign == sign:
                return name
        raise ReductionFailed(f"(sigma={to_images(sigma)}, sign={sign}) is not in G0")

    def table(self) -> dict[TreePath, H1Entry]:
        return {e.path: e for e in self.H1}

    def to_json(self) -> dict:
        gens = []
        for name, g in zip(self.G0_names, self.G0):
            if name:
                gens.append({**aut_to_json(g, name), "kind": "G0", "label": g.label()})
        for e in self.H1:
            if e.status == "generator":
                gens.append({**aut_to_json(e.aut, e.name), "kind": "H1", "label": e.aut.label()})
        cert = {
            "complete": self.complete,
            "B_method": self.bset.method,
            "B_size": len(self.bset),
            "l_values": [self.l_values[k] for k in self.bset.keys],
            "B_witness_paths": [list(self.bset.witnesses[k]) for k in self.bset.keys],
            "B_representatives": [self.bset.reps[k].tolist() for k in self.bset.keys],
            "P1_max_len": self.max_len,
            "P1_count": len(self.H1),
            "P1_paths": [
                {
                    "path": list(e.path),
                    "paper_subscript": paper_subscript(e.path),
                    "sigma": to_images(e.aut.sigma),
                    "sign": "+" if e.aut.sign > 0 else "-",
                    "status": e.status,
                    **({"equal_to": e.equal_to} if e.equal_to else {}),
                }
                for e in self.H1
            ],
            "notes": list(self.notes),
        }
        if self.class_count is not None:
            cert["mutation_classes"] = self.class_count
        return {
            "mode": self.mode,
            "classes": len(self.bset),
            "l": self.l,
            "G0_order": len(self.G0),
            "H1_count": self.H1_count,
            "generators": gens,
            "certificate": cert,
        }

    def gens_file(self) -> dict:
        return {"gens": {d["name"]: {k: d[k] for k in ("path", "sigma", "sign")} for d in self.to_json()["generators"]}}


def extract_generators(
    pattern: ClusterPattern,
    mode: str,
    max_len: Optional[int] = None,
    max_depth: int = 10,
    max_classes: int = 100_000,
    use_cmatrix: bool = False,
    threads: Optional[int] = None,
) -> GeneratorSet:
    """G0 together with one automorphism per weight-2 return path shorter than 2l+2.

    ``max_len`` is the path bound L of the bounded mode; in the other modes it
    optionally overrides the derived bound 2l+1.
    """
    mode = normalize_mode(mode)
    B0 = pattern.B
    notes: list[str] = []
    class_count = None
    if mode == "finite-mutation":
        idx = enumerate_class(B0, max_depth, max_classes)
        if not idx.finite:
            raise ModeUnavailable(f"mutation class did not close ({idx.diagnostic})")
        class_count = len(idx)
        bset = compute_B_set(pattern)
        dist = idx.depth
        complete = True
        ss = False
    elif mode == "acyclic-ss":
        if not is_acyclic(B0):
            raise ModeUnavailable("acyclic-ss mode needs an acyclic root matrix")
        bset = compute_B_set(pattern, sink_source_only=True)
        idx = class_distances(B0, max_depth=10**6, max_classes=max_classes, sink_source_only=True)
        dist = idx.depth
        complete = True
        ss = True
    else:
        if max_len is None:
            raise ModeUnavailable("bounded mode needs a path bound L")
        bset = compute_B_set(pattern, max_len=max_len)
        idx = class_distances(B0, max_depth=max_len, max_classes=max_classes)
        dist = idx.depth
        complete = False
        ss = False
        notes.append(f"class set is a lower bound from paths of length <= {max_len}")
    missing = [k for k in bset.keys if k not in dist]
    if missing:
        raise ModeUnavailable(f"{len(missing)} classes of the return paths have no certified distance")
    l_values = {k: dist[k] for k in bset.keys}
    l = max(l_values.values())
    if mode == "bounded":
        bound = min(2 * l + 1, max_len)
    else:
        bound = max_len if max_len is not None else 2 * l + 1
    bound = max(bound, 1)
    p1 = enumerate_P1(pattern, bound, ss, threads)
    G0 = compute_G0(pattern)
    G0_names: list[Optional[str]] = []
    i = 0
    for g in G0:
        if g.path == () and g.sigma == tuple(range(pattern.n)) and g.sign == 1:
            G0_names.append(None)
        else:
            i += 1
            G0_names.append(f"psi{i}")
    entries = _dedup(pattern, p1.paths, G0, G0_names, use_cmatrix, threads)
    return GeneratorSet(
        pattern, mode, G0, G0_names, entries, bset, l_values, l, bound, complete, class_count, notes
    )


def _dedup(pattern, paths, G0, G0_names, use_cmatrix, threads) -> list[H1Entry]:
    auts = ordered_map(lambda p: chosen_aut(pattern, p), paths, threads)
    by_fp: dict[tuple, list[tuple[str, AutQuad]]] = {}
    for name, g in zip(G0_names, G0):
        if name:
            by_fp.setdefault(g.fingerprint(), []).append((name, g))
    entries = []
    count = 0
    for path, f in zip(paths, auts):
        if is_identity(f, use_cmatrix):
            entries.append(H1Entry(path, f, None, "identity"))
            continue
        match = None
        for name, g in by_fp.get(f.fingerprint(), []):
            if aut_equal(f, g, use_cmatrix):
                match = name
                break
        if match is not None:
            status = "in-G0" if match.startswith("psi") else "duplicate"
            entries.append(H1Entry(path, f, match, status, match))
            continue
        count += 1
        name = f"h{count}"
        by_fp.setdefault(f.fingerprint(), []).append((name, f))
        entries.append(H1Entry(path, f, name, "generator"))
    return entries


# constructive reduction


def _g0_word(gset: GeneratorSet, h: AutQuad) -> Word:
    if h.path:
        raise ReductionFailed(f"expected an element of G0, got path {list(h.path)}")
    name = gset.g0_name(h.sigma, h.sign)
    return () if name is None else ((name, 1),)


def _first_root_interior(pattern: ClusterPattern, path: TreePath, root_key: bytes) -> Optional[int]:
    for i in range(1, len(path)):
        if class_key(pattern.matrix(path[:i])) == root_key:
            return i
    return None


def _is_ss(pattern: ClusterPattern, path: TreePath) -> bool:
    return all(_ss_ok(pattern.matrix(path[:i]), path[i]) for i in range(len(path)))


def _nearest_root_vertex(pattern: ClusterPattern, start: TreePath, limit: int, root_key: bytes, ss: bool) -> Optional[TreePath]:
    frontier = [start]
    seen = {start}
    for _ in range(limit):
        nxt = []
        for v in frontier:
            M = pattern.matrix(v)
            for k in range(1, pattern.n + 1):
                if ss and not _ss_ok(M, k):
                    continue
                w = append_step(v, k)
                if w in seen:
                    continue
                seen.add(w)
                if class_key(pattern.matrix(w)) == root_key:
                    return w
                nxt.append(w)
        frontier = nxt
    return None


def _ss_seed_match(pattern: ClusterPattern, f: AutQuad, max_len: int, use_cmatrix: bool) -> Optional[AutQuad]:
    """An automorphism equal to f whose path is a sink-source sequence."""
    target_fp = pattern.fingerprint(f.path)
    target_set = frozenset(target_fp)
    frontier: list[TreePath] = [()]
    seen = {frozenset(pattern.fingerprint(()))}
    for depth in range(max_len + 1):
        for s in frontier:
            fp_s = pattern.fingerprint(s)
            if frozenset(fp_s) != target_set:
                continue
            where = {v: i for i, v in enumerate(fp_s)}
            rho = tuple(where[target_fp[j]] for j in f.sigma)
            for sign in (1, -1):
                cand = AutQuad(pattern, s, rho, sign)
                if is_valid(pattern, s, rho, sign) and aut_equal(f, cand, use_cmatrix):
                    return cand
        if depth == max_len:
            break
        nxt = []
        for s in frontier:
            M = pattern.matrix(s)
            for k in range(1, pattern.n + 1):
                if (s and s[-1] == k) or not _ss_ok(M, k):
                    continue
                w = s + (k,)
                key = frozenset(pattern.fingerprint(w))
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(w)
        frontier = nxt
    return None


def reduce_to_generators(
    f: AutQuad,
    gset: GeneratorSet,
    verify: bool = False,
    use_cmatrix: bool = False,
    ss_search_len: Optional[int] = None,
) -> Word:
    """Express f as a word over ``gset.gens`` by the constructive induction.

    Long weight-2 paths are split at a vertex t' at distance l+1 from the
    root: a nearest root-class vertex s of t' gives f = f_s o h with both
    factors on shorter paths.  In acyclic mode, paths that are not
    sink-source sequences are first replaced by a sink-source path reaching
    the same unlabelled seed.
    """
    pattern = f.pattern
    root_key = class_key(pattern.B)
    table = gset.table()
    ss = gset.mode == "acyclic-ss"

    def rec(g: AutQuad, depth: int) -> Word:
        if depth > 200:
            raise ReductionFailed("recursion too deep")
        if not g.path:
            return _g0_word(gset, g)
        i = _first_root_interior(pattern, g.path, root_key)
        if i is not None:
            head = chosen_aut(pattern, g.path[:i])
            return rec(head, depth + 1) + rec(factor_through(g, head), depth + 1)
        if ss and not _is_ss(pattern, g.path):
            bound = ss_search_len if ss_search_len is not None else 2 * len(g.path) + 2
            alt = _ss_seed_match(pattern, g, bound, use_cmatrix)
            if alt is None:
                raise ReductionFailed(f"no sink-source path of length <= {bound} reaches the seed of {list(g.path)}")
            base = chosen_aut(pattern, alt.path)
            return rec(base, depth + 1) + _g0_word(gset, factor_through(alt, base))
        entry = table.get(g.path)
        if entry is not None:
            rest = _g0_word(gset, factor_through(g, entry.aut))
            head = () if entry.status == "identity" else ((entry.name, 1),)
            return head + rest
        lj = gset.l
        if len(g.path) < 2 * lj + 2:
            raise ReductionFailed(f"path {list(g.path)} is short but missing from the generator table")
        mid = g.path[: lj + 1]
        s = _nearest_root_vertex(pattern, mid, lj, root_key, ss)
        if s is None:
            raise ReductionFailed(f"no root-class vertex within {lj} steps of {list(mid)}")
        head = chosen_aut(pattern, s)
        return rec(head, depth + 1) + rec(factor_through(g, head), depth + 1)

    word = rec(f, 0)
    if verify:
        from .grouplab import evaluate

        if not aut_equal(evaluate(word, gset.gens, pattern), f, use_cmatrix):
            raise ReductionFailed("reduced word does not evaluate to the input automorphism")
    return word


__all__ = [
    "BSet",
    "ClassIndex",
    "GeneratorSet",
    "GradedPathSet",
    "H1Entry",
    "MODES",
    "class_distances",
    "compute_B_set",
    "compute_G0",
    "enumerate_P1",
    "enumerate_class",
    "extract_generators",
    "find_sink_source_representative",
    "identity_aut",
    "normalize_mode",
    "path_weight",
    "reduce_to_generators",
]
