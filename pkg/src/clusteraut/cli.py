"""Command-line interface.

Paths on the command line are 1-based, comma-separated and in application
order (leftmost mutation first).  Reports echo both that order and the
reversed operator-order subscript.  Output is JSON unless --text is given.

Exit codes: 0 success, 1 other library error, 2 parse or input error,
3 matrix not skew-symmetrizable, 4 integer overflow, 5 mode unavailable or
resource bound hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .autom import aut_to_json
from .errors import (
    ClusterAutError,
    IntegerOverflow,
    InvalidAut,
    InvalidPath,
    ModeUnavailable,
    NotSkewSymmetrizable,
    ResourceBound,
    WordSyntaxError,
)
from .exmatrix import ExchangeMatrix, arrows, is_acyclic, is_indecomposable, matrix_from_json, to_dot, weight_label, weight_sum
from .grouplab import (
    load_gens,
    load_relations_text,
    order_bound,
    prune_generators,
    relation_search,
    scan_x7_pattern,
    verify_relations,
)
from .parallel import thread_count
from .search import enumerate_class, extract_generators, normalize_mode
from .seeds import ClusterPattern, paper_subscript

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_NOT_SYMMETRIZABLE = 3
EXIT_OVERFLOW = 4
EXIT_UNAVAILABLE = 5

BUILTIN_DIR = "data"


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


# input helpers


def builtin_names() -> list[str]:
    root = resources.files(__package__).joinpath(BUILTIN_DIR)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _read_json(spec: str) -> dict:
    """A file path, or ``builtin:NAME`` for a bundled data file."""
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        res = resources.files(__package__).joinpath(BUILTIN_DIR, f"{name}.json")
        if not res.is_file():
            raise UsageError(f"unknown builtin {name!r}; available: {', '.join(builtin_names())}")
        text = res.read_text(encoding="utf-8")
    else:
        try:
            text = Path(spec).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {spec}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{spec}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def read_matrix(spec: str) -> ExchangeMatrix:
    obj = _read_json(spec)
    try:
        return matrix_from_json(obj)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ClusterAutError):
            raise
        raise UsageError(f"{spec}: {exc}") from exc


def parse_path_arg(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",")]
    except ValueError as exc:
        raise UsageError(f"path must be comma-separated integers, got {text!r}") from exc


def read_words(spec: Optional[str], gens_obj: dict) -> list[str]:
    if spec is None:
        words = gens_obj.get("words", [])
        if not isinstance(words, list):
            raise UsageError('"words" must be a list of relation strings')
        return [str(w) for w in words]
    if spec.endswith(".json") or spec.startswith("builtin:"):
        obj = _read_json(spec)
        words = obj.get("words", obj) if isinstance(obj, dict) else obj
        return [str(w) for w in words]
    try:
        return load_relations_text(Path(spec).read_text(encoding="utf-8").splitlines())
    except OSError as exc:
        raise UsageError(f"cannot read {spec}: {exc.strerror}") from exc


def _positive(name: str):
    def conv(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if value < 1:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return value

    return conv


# commands


def _matrix_report(B: ExchangeMatrix) -> dict:
    return {
        "n": B.n,
        "B": B.tolist(),
        "arrows": [{"from": i, "to": j, "weight": weight_label(m)} for i, j, m in arrows(B)],
        "weight_sum": str(weight_sum(B)),
    }


def cmd_mutate(args) -> tuple[dict, str]:
    B = read_matrix(args.matrix)
    pattern = ClusterPattern(B)
    path = pattern.check(parse_path_arg(args.path))
    Bt = pattern.matrix(path)
    out = {"path": list(path), "paper_subscript": paper_subscript(path), **_matrix_report(Bt)}
    if args.seed:
        out["cluster"] = [str(p) for p in pattern.cluster(path)]
    lines = [f"path {list(path)} (operator order mu_{paper_subscript(path) or '()'})"]
    lines += ["  " + " ".join(f"{v:>3}" for v in row) for row in Bt.tolist()]
    for a in out["arrows"]:
        lines.append(f"  {a['from']} -> {a['to']}  weight {a['weight']}")
    if args.seed:
        lines += [f"  x{i + 1};t = {p}" for i, p in enumerate(out["cluster"])]
    return out, "\n".join(lines)


def cmd_class(args) -> tuple[dict, str]:
    B = read_matrix(args.matrix)
    idx = enumerate_class(B, args.max_depth, args.max_classes)
    out = {
        **idx.to_json(),
        "acyclic": is_acyclic(B),
        "indecomposable": is_indecomposable(B),
    }
    status = "closed" if idx.finite else "truncated"
    text = f"classes: {len(idx)} ({status}); max depth {idx.max_depth}"
    if not idx.finite and idx.diagnostic:
        text += f"\n  {idx.diagnostic}"
    return out, text


def cmd_generators(args) -> tuple[dict, str]:
    B = read_matrix(args.matrix)
    pattern = ClusterPattern(B)
    mode = normalize_mode(args.mode)
    gset = extract_generators(
        pattern,
        mode,
        max_len=args.max_len,
        max_depth=args.max_depth,
        max_classes=args.max_classes,
        use_cmatrix=args.cmatrix,
        threads=args.threads,
    )
    out = gset.to_json()
    if args.prune:
        kept, words = prune_generators(gset.gens, radius=args.prune_radius, use_cmatrix=args.cmatrix)
        out["pruned"] = {"kept": kept, "expressions": words}
    if args.gens_out:
        doc = gset.gens_file()
        if args.prune:
            doc = {"gens": {k: doc["gens"][k] for k in out["pruned"]["kept"]}}
        Path(args.gens_out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    lines = [
        f"mode {out['mode']}: {out['classes']} classes in B, l = {out['l']}, "
        f"G0 order {out['G0_order']}, {out['certificate']['P1_count']} return paths, "
        f"{out['H1_count']} distinct H1 generators"
    ]
    for g in out["generators"]:
        lines.append(f"  {g['name']}: path {g['path']} sigma {g['sigma_cycles']} sign {g['sign']}  [{g['label']}]")
    if args.prune:
        lines.append(f"after pruning: {' '.join(out['pruned']['kept'])}")
        for k, w in out["pruned"]["expressions"].items():
            lines.append(f"  {k} = {w}")
    for note in out["certificate"]["notes"]:
        lines.append(f"note: {note}")
    return out, "\n".join(lines)


def _load_gens_arg(pattern: ClusterPattern, spec: str) -> tuple[dict, dict]:
    obj = _read_json(spec)
    if not isinstance(obj, dict):
        raise UsageError(f"{spec}: expected a JSON object with a \"gens\" field")
    try:
        return load_gens(pattern, obj), obj
    except (AttributeError, KeyError, TypeError) as exc:
        raise UsageError(f"{spec}: malformed generator entry ({exc})") from exc


def _select(gens: dict, names: Optional[str]) -> dict:
    if not names:
        return gens
    chosen = {}
    for name in names.split(","):
        name = name.strip()
        if name not in gens:
            raise UsageError(f"unknown generator {name!r}")
        chosen[name] = gens[name]
    return chosen


def cmd_relations(args) -> tuple[dict, str]:
    B = read_matrix(args.matrix)
    pattern = ClusterPattern(B)
    gens, _ = _load_gens_arg(pattern, args.gens)
    gens = _select(gens, args.names)
    report = relation_search(
        gens, args.max_len, cap=args.cap, use_cmatrix=args.cmatrix, order_pow=args.order_pow, pattern=pattern
    )
    return report.to_json(), report.text()


def cmd_verify(args) -> tuple[dict, str]:
    B = read_matrix(args.matrix)
    pattern = ClusterPattern(B)
    gens, obj = _load_gens_arg(pattern, args.gens)
    words = read_words(args.words, obj)
    checks = verify_relations(gens, words, use_cmatrix=args.cmatrix, threads=args.threads, pattern=pattern)
    out = {
        "generators": [aut_to_json(g, name) for name, g in gens.items()],
        "results": [c.to_json() for c in checks],
        "all_hold": all(c.holds for c in checks),
    }
    if args.orders:
        out["orders"] = {name: order_bound(g, args.orders, args.cmatrix).to_json() for name, g in gens.items()}
    lines = [f"{'holds' if c.holds else 'FAILS'}: {c.text}" for c in checks]
    for name, o in out.get("orders", {}).items():
        lines.append(f"{name}: {o['text']}")
    return out, "\n".join(lines)


def cmd_dot(args) -> tuple[dict, str]:
    B = read_matrix(args.matrix)
    pattern = ClusterPattern(B)
    path = pattern.check(parse_path_arg(args.path))
    dot = to_dot(pattern.matrix(path))
    return {"path": list(path), "paper_subscript": paper_subscript(path), "dot": dot}, dot.rstrip("\n")


def cmd_scan(args) -> tuple[dict, str]:
    B = read_matrix(args.matrix)
    pattern = ClusterPattern(B)
    gens, _ = _load_gens_arg(pattern, args.gens)
    rows = scan_x7_pattern(gens, args.k_max, exact=args.exact, a=args.a, f=args.f)
    out = {"observations": rows, "exact": args.exact}
    lines = [
        f"k={r['k']}: {r['observed_text']} (expected {r['expected_order']}, {r['evidence']})"
        for r in rows
    ]
    return out, "\n".join(lines)


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--text", action="store_true", help="human-readable summary instead of JSON")
    common.add_argument("--threads", type=_positive("--threads"), default=None,
                        help="worker threads (default: CLUSTERAUT_THREADS or 1)")

    parser = argparse.ArgumentParser(
        prog="clusteraut",
        description="Cluster automorphism groups from exchange matrices.",
        epilog="MATRIX is a JSON file {\"n\": N, \"B\": [[...]]} or builtin:NAME "
        "(builtins: a2, rank3_acyclic, chain4_234, chain4_222, x7).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mutate", parents=[common], help="mutate along a path")
    p.add_argument("matrix")
    p.add_argument("--path", default="", help="comma-separated labels in application order, e.g. 2,1,3")
    p.add_argument("--seed", action="store_true", help="also print the cluster as Laurent polynomials")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("class", parents=[common], help="enumerate the mutation class up to permutation and sign")
    p.add_argument("matrix")
    p.add_argument("--max-depth", type=_positive("--max-depth"), default=10)
    p.add_argument("--max-classes", type=_positive("--max-classes"), default=100_000)
    p.set_defaults(func=cmd_class)

    p = sub.add_parser("generators", parents=[common], help="extract a generating set")
    p.add_argument("matrix")
    p.add_argument("--mode", default="finite-mutation", help="finite-mutation, acyclic-ss or bounded")
    p.add_argument("--max-len", type=_positive("--max-len"), default=None,
                   help="path bound (required for bounded mode)")
    p.add_argument("--max-depth", type=_positive("--max-depth"), default=10)
    p.add_argument("--max-classes", type=_positive("--max-classes"), default=100_000)
    p.add_argument("--cmatrix", action="store_true", help="enable the c-vector pre-filter")
    p.add_argument("--prune", action="store_true", help="drop generators expressible by the others")
    p.add_argument("--prune-radius", type=_positive("--prune-radius"), default=4)
    p.add_argument("--gens-out", default=None, help="write a generators file usable by relations/verify")
    p.set_defaults(func=cmd_generators)

    p = sub.add_parser("relations", parents=[common], help="search for relations among generators")
    p.add_argument("matrix")
    p.add_argument("gens")
    p.add_argument("--names", default=None, help="comma-separated subset of generators to use")
    p.add_argument("--max-len", type=_positive("--max-len"), default=8, help="word ball radius")
    p.add_argument("--cap", type=_positive("--cap"), default=1_000_000, help="maximum ball size")
    p.add_argument("--order-pow", type=_positive("--order-pow"), default=None,
                   help="also test generator orders up to this power")
    p.add_argument("--cmatrix", action="store_true", help="enable the c-vector pre-filter")
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("verify", parents=[common], help="check relations between words")
    p.add_argument("matrix")
    p.add_argument("gens")
    p.add_argument("words", nargs="?", default=None,
                   help="relations file (one per line, or JSON list); default: the gens file's \"words\"")
    p.add_argument("--orders", type=_positive("--orders"), default=None,
                   help="also report generator orders up to this power")
    p.add_argument("--cmatrix", action="store_true", help="enable the c-vector pre-filter")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dot", parents=[common], help="weighted quiver in Graphviz DOT")
    p.add_argument("matrix")
    p.add_argument("--path", default="")
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("scan-x7-pattern", parents=[common], help="exploratory scan of (a f^2k)^k (a f^-2k)^k")
    p.add_argument("matrix")
    p.add_argument("gens")
    p.add_argument("--k-max", type=_positive("--k-max"), default=3)
    p.add_argument("--exact", action="store_true", help="confirm observed orders with Laurent polynomials")
    p.add_argument("--a", default="a")
    p.add_argument("--f", default="f")
    p.set_defaults(func=cmd_scan)
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, NotSkewSymmetrizable):
        return EXIT_NOT_SYMMETRIZABLE
    if isinstance(exc, IntegerOverflow):
        return EXIT_OVERFLOW
    if isinstance(exc, (ModeUnavailable, ResourceBound)):
        return EXIT_UNAVAILABLE
    if isinstance(exc, (UsageError, InvalidPath, InvalidAut, WordSyntaxError, ValueError)):
        return EXIT_PARSE
    return EXIT_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = thread_count(args.threads)
    try:
        if getattr(args, "mode", None) is not None:
            try:
                args.mode = normalize_mode(args.mode)
            except ModeUnavailable as exc:
                raise UsageError(str(exc)) from exc
            if args.mode == "bounded" and args.max_len is None:
                raise UsageError("bounded mode needs --max-len")
        out, text = args.func(args)
    except (ClusterAutError, UsageError, ValueError) as exc:
        print(f"clusteraut: error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    if args.text:
        print(text)
    else:
        print(json.dumps(out, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
