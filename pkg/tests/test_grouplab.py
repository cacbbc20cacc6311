import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from clusteraut.autom import aut_equal, compose, inverse
from clusteraut.errors import InvalidAut, WordSyntaxError
from clusteraut.grouplab import (
    evaluate,
    find_word,
    load_gens,
    load_relations_text,
    order_bound,
    prune_generators,
    quotient_ball_sizes,
    relation_search,
    scan_x7_pattern,
    verify_relations,
)
from clusteraut.search import extract_generators
from clusteraut.words import parse_word

from conftest import builtin_gens

X7_AF_GROWTH = [1, 4, 10, 22, 46, 92, 178, 340, 642, 1194, 2185, 3940, 7026]
X7_AF_RELATORS = [
    "(a f)^5",
    "(a f a f^-1)^3",
    "(a f^2)^3 (f^2 a)^-3",
    "(a f^2 a f^-2)^3",
    "(a f^3 a f^-3)^3",
    "(a f^4)^2 (f^4 a)^-2",
    "(a f^6 a f^-6)^3",
]


def test_evaluate_matches_compose(x7_gens):
    gens, _ = x7_gens
    a, f = gens["a"], gens["f"]
    assert aut_equal(evaluate("a f", gens), compose(a, f))
    assert aut_equal(evaluate("f^-2", gens), inverse(compose(f, f)))
    assert aut_equal(evaluate("(a f)^2", gens), compose(compose(a, f), compose(a, f)))
    e = evaluate("id", gens)
    assert e.path == () and e.sign == 1 and e.sigma == tuple(range(7))
    with pytest.raises(WordSyntaxError):
        evaluate("a zz", gens)
    with pytest.raises(WordSyntaxError):
        evaluate("(a f", gens)


def test_order_bound(x7_gens, chain234):
    gens, _ = x7_gens
    assert order_bound(gens["tau"], 12).order == 2
    assert order_bound(gens["a"], 12).order == 2
    assert order_bound(compose(gens["a"], gens["f"]), 12).order == 5
    g, _ = builtin_gens(chain234, "chain4_234_gens")
    res = order_bound(g["x"], 12)
    assert res.order is None and str(res) == "order > 12"
    with pytest.raises(ValueError):
        order_bound(gens["a"], 0)


def test_bundled_identities_hold(x7_gens, chain234, chain222, rank3):
    gens, words = x7_gens
    assert all(r.holds for r in verify_relations(gens, words, use_cmatrix=True))
    for pattern, name in ((chain234, "chain4_234_gens"), (chain222, "chain4_222_gens"), (rank3, "rank3_acyclic_gens")):
        g, w = builtin_gens(pattern, name)
        assert w and all(r.holds for r in verify_relations(g, w))


def test_verify_detects_false_relation(x7_gens):
    gens, _ = x7_gens
    res = verify_relations(gens, ["a f = f a", "tau = id", "a^2 = id"])
    assert [r.holds for r in res] == [False, False, True]
    assert res[0].to_json()["holds"] is False


def test_tau_centralizes_g0_plus(x7_gens):
    gens, _ = x7_gens
    res = verify_relations(gens, ["tau a = a tau", "tau b = b tau", "tau f = f tau"])
    assert [r.holds for r in res] == [True, True, False]


def test_relation_search_x7_ab(x7_gens):
    gens, _ = x7_gens
    rep = relation_search({"a": gens["a"], "b": gens["b"]}, 6)
    assert rep.closed and rep.growth[-1] == 6
    assert sorted(rep.relators()) == sorted(["a^2", "b^2", "(a b)^3"])
    doc = rep.to_json()
    assert doc["group_order"] == 6
    assert json.loads(json.dumps(doc)) == doc


def test_relation_search_dihedral(chain234):
    g, _ = builtin_gens(chain234, "chain4_234_gens")
    rep = relation_search({"x": g["x"], "y": g["y"]}, 8)
    assert rep.growth == [1, 4, 8, 12, 16, 20, 24, 28, 32]
    assert sorted(rep.relators()) == sorted(["y^2", "(x y)^2"])
    assert rep.involutions == ["y"]
    assert "D_infinity" in rep.label
    assert "consistent with" in rep.text()


def test_relation_search_x7_af_growth(x7_gens):
    gens, _ = x7_gens
    rep = relation_search({"a": gens["a"], "f": gens["f"]}, 12)
    assert rep.growth == X7_AF_GROWTH
    assert not rep.closed
    assert rep.orders["a"].order == 2


def test_relation_search_rejects_bad_radius(x7_gens):
    gens, _ = x7_gens
    with pytest.raises(ValueError):
        relation_search(gens, 0)


def test_relation_search_independent_of_generator_copies(x7_gens):
    gens, _ = x7_gens
    a = relation_search({"a": gens["a"], "b": gens["b"]}, 5).to_json()
    b = relation_search({"a": gens["a"], "b": gens["b"]}, 5).to_json()
    assert json.dumps(a) == json.dumps(b)


def test_find_word_and_prune(x7, x7_gens):
    gens, _ = x7_gens
    target = evaluate("a f^2 a", gens)
    word = find_word(target, {"a": gens["a"], "f": gens["f"]}, 4)
    assert word is not None and len(word) <= 4
    assert aut_equal(evaluate(word, gens), target)
    gs = extract_generators(x7, "finite-mutation")
    kept, exprs = prune_generators(gs.gens, 4)
    assert kept == ["psi1", "psi2", "psi4", "h7"]
    for name, text in exprs.items():
        assert aut_equal(evaluate(text, gs.gens), gs.gens[name])


def test_load_gens_formats(x7):
    gens = load_gens(
        x7,
        {
            "gens": {
                "a": {"path": [], "sigma": "(2 4)(3 5)", "sign": 1},
                "b": {"path": [], "sigma": [1, 2, 3, 6, 7, 4, 5], "sign": 1},
                "h": {"path": [3]},
                "ab": {"word": "a b"},
            }
        },
    )
    assert aut_equal(gens["ab"], compose(gens["a"], gens["b"]))
    assert gens["h"].path == (3,)
    with pytest.raises(InvalidAut):
        load_gens(x7, {"gens": {"h": {"path": [1]}}})
    with pytest.raises(WordSyntaxError):
        load_gens(x7, {"gens": {"id": {"path": []}}})
    assert load_relations_text(["# c", "", " a = b "]) == ["a = b"]


def test_quotient_ball_small_cases():
    assert quotient_ball_sizes(["a", "b"], ["a", "b"], ["(a b)^3"], 5) == [1, 3, 5, 6, 6, 6]
    assert quotient_ball_sizes(["x", "y"], ["y"], ["(x y)^2"], 4) == [1, 4, 8, 12, 16]
    # free group on one generator
    assert quotient_ball_sizes(["x"], [], [], 3) == [1, 3, 5, 7]


@pytest.mark.slow
def test_quotient_ball_matches_x7_af():
    rels = [parse_word(r) for r in X7_AF_RELATORS]
    assert quotient_ball_sizes(["a", "f"], ["a"], rels, 12) == X7_AF_GROWTH


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**31), st.integers(min_value=1, max_value=4))
def test_quotient_ball_monotone(seed, radius):
    rng = random.Random(seed)
    rels = []
    for _ in range(rng.randint(0, 2)):
        rels.append(tuple((rng.choice("xy"), rng.choice((1, -1))) for _ in range(rng.randint(2, 5))))
    sizes = quotient_ball_sizes(["x", "y"], [], rels, radius)
    assert sizes[0] == 1
    assert all(p <= q for p, q in zip(sizes, sizes[1:]))
    assert all(s <= 1 + 2 * (3**r - 1) for r, s in enumerate(sizes))


def test_scan_x7_pattern(x7_gens):
    gens, _ = x7_gens
    rows = scan_x7_pattern(gens, k_max=2, exact=True)
    assert [r["k"] for r in rows] == [1, 2]
    # recorded as observations; the first two values are confirmed exactly
    assert rows[0]["observed_order"] == 3 and rows[0]["evidence"] == "laurent"
    assert rows[1]["observed_order"] == 1


def test_dihedral_rearrangements(chain234):
    g, _ = builtin_gens(chain234, "chain4_234_gens")
    gens = {"x": g["x"], "y": g["y"]}
    res = verify_relations(gens, ["x y x y = id", "x y = y x^-1", "x y x^-1 y = x^2", "x y x^-1 y = id"])
    assert [r.holds for r in res] == [True, True, True, False]
