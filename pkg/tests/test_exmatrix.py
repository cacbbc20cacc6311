import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusteraut.errors import IntegerOverflow, NotSkewSymmetrizable
from clusteraut.exmatrix import (
    ExchangeMatrix,
    WeightSum,
    arrows,
    class_key,
    is_acyclic,
    is_indecomposable,
    matrix_from_json,
    matrix_to_json,
    mutate_matrix,
    permute_matrix,
    same_class,
    skew_symmetrizer,
    to_dot,
    weight_sum,
)
from clusteraut.perms import from_cycles, from_images

from conftest import builtin_matrix
from strategies import exchange_matrices, permutations


def brute_force_key(B: ExchangeMatrix) -> tuple:
    best = None
    for p in itertools.permutations(range(B.n)):
        M = permute_matrix(p, B)
        for cand in (M, -M):
            flat = tuple(v for row in cand.entries for v in row)
            if best is None or flat < best:
                best = flat
    return best


# examples


def test_rank2_mutation_flips_sign():
    assert mutate_matrix(ExchangeMatrix([[0, 1], [-1, 0]]), 1).tolist() == [[0, -1], [1, 0]]


def test_x7_mutation_at_2_reverses_triangle():
    B = builtin_matrix("x7")
    M = mutate_matrix(B, 2)
    got = {(i, j): m for i, j, m in arrows(M)}
    # the triangle 1,2,3 is reversed and the double arrow now runs 3 -> 2
    assert got[(2, 1)] == 1 and got[(1, 3)] == 1 and got[(3, 2)] == 4
    for i, j, m in arrows(B):
        if {i, j} & {2, 3} == set():
            assert got[(i, j)] == m


def test_mutation_rejects_bad_direction():
    with pytest.raises(ValueError):
        mutate_matrix(ExchangeMatrix([[0, 1], [-1, 0]]), 3)


def test_overflow_detected():
    big = 4_000_000_000
    B = ExchangeMatrix([[0, big, 0], [-big, 0, big], [0, -big, 0]])
    with pytest.raises(IntegerOverflow):
        mutate_matrix(B, 2)


def test_entries_outside_int64_rejected():
    with pytest.raises(IntegerOverflow):
        ExchangeMatrix([[0, 2**63], [-(2**63), 0]])


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[0, 2], [-2, 0]], (1, 1)),
        ([[0, 1], [-3, 0]], (3, 1)),
        ([[0, 0, 0], [0, 0, 0], [0, 0, 0]], (1, 1, 1)),
    ],
)
def test_skew_symmetrizer_examples(rows, expected):
    assert skew_symmetrizer(rows) == expected


@pytest.mark.parametrize(
    "rows",
    [
        [[0, 1], [1, 0]],
        [[1, 0], [0, 0]],
        [[0, 1], [0, 0]],
        # cycle condition fails: d1 = 2 d2, d2 = d3, d3 = d1
        [[0, 1, -1], [-2, 0, 1], [1, -1, 0]],
    ],
)
def test_not_skew_symmetrizable(rows):
    with pytest.raises(NotSkewSymmetrizable):
        skew_symmetrizer(rows)
    with pytest.raises(NotSkewSymmetrizable):
        ExchangeMatrix(rows)


def test_symmetrizer_is_per_component():
    # two components, each normalised separately
    B = [[0, 1, 0, 0], [-3, 0, 0, 0], [0, 0, 0, 2], [0, 0, -1, 0]]
    assert skew_symmetrizer(B) == (3, 1, 1, 2)


def test_permute_examples():
    B = ExchangeMatrix([[0, 1], [-1, 0]])
    assert permute_matrix((0, 1), B) == B
    assert permute_matrix((1, 0), B) == -B
    X7 = builtin_matrix("x7")
    assert permute_matrix(from_cycles("(2 4)(3 5)", 7), X7) == X7


def test_permute_index_rule():
    B = ExchangeMatrix([[0, 1, 0], [-1, 0, 2], [0, -2, 0]])
    sigma = from_images([2, 3, 1])
    M = permute_matrix(sigma, B)
    inv = {s: i for i, s in enumerate(sigma)}
    for i in range(3):
        for j in range(3):
            assert M.entries[i][j] == B.entries[inv[i]][inv[j]]


def test_acyclic_and_indecomposable():
    assert is_acyclic(builtin_matrix("chain4_234"))
    assert is_indecomposable(builtin_matrix("chain4_234"))
    assert not is_acyclic(builtin_matrix("x7"))
    Z = ExchangeMatrix([[0] * 3] * 3)
    assert is_acyclic(Z) and not is_indecomposable(Z)
    assert is_indecomposable(ExchangeMatrix([[0]]))


def test_weight_sums():
    assert weight_sum(ExchangeMatrix([[0, 2], [-2, 0]])) == WeightSum([4])
    assert weight_sum(builtin_matrix("chain4_222")) == WeightSum([4, 4, 4])
    assert str(weight_sum(builtin_matrix("chain4_222"))) == "6"


def test_weight_sum_exact_comparisons():
    # sqrt(2) + sqrt(3) = 3.146... < sqrt(10) = 3.162...
    assert WeightSum([2, 3]) < WeightSum([10])
    # sqrt(8) == 2 sqrt(2)
    assert WeightSum([8]) == WeightSum([2, 2])
    # sqrt(3) + sqrt(5) = 3.968... sits between sqrt(15) and 4
    assert WeightSum([3, 5]) < WeightSum([16])
    assert WeightSum([3, 5]) > WeightSum([15])
    assert not WeightSum([3]) == WeightSum([4])


def test_weight_sums_increase_along_alternating_line():
    B = builtin_matrix("chain4_222")
    sums = [weight_sum(B)]
    for step in (2, 1, 2, 1):
        B = mutate_matrix(B, step)
        sums.append(weight_sum(B))
    assert all(a < b for a, b in zip(sums, sums[1:]))


def test_dot_output():
    dot = to_dot(ExchangeMatrix([[0, 1], [-3, 0]]))
    assert '1 -> 2 [label="sqrt(3)"]' in dot
    assert to_dot(ExchangeMatrix([[0, 2], [-2, 0]])).count('label="2"') == 1


def test_json_round_trip():
    B = builtin_matrix("x7")
    assert matrix_from_json(matrix_to_json(B)) == B
    with pytest.raises(ValueError):
        matrix_from_json({"n": 3, "B": [[0, 1], [-1, 0]]})


def test_class_key_examples():
    B = builtin_matrix("chain4_234")
    assert class_key(B) == class_key(-B)
    assert class_key(B) == class_key(permute_matrix((2, 0, 3, 1), B))
    assert class_key(B) != class_key(mutate_matrix(B, 2))


# properties


@settings(max_examples=200, deadline=None)
@given(exchange_matrices(), st.data())
def test_mutation_is_involution(B, data):
    k = data.draw(st.integers(1, B.n))
    assert mutate_matrix(mutate_matrix(B, k), k) == B


@settings(max_examples=200, deadline=None)
@given(exchange_matrices(), st.data())
def test_symmetrizer_stable_under_mutation(B, data):
    k = data.draw(st.integers(1, B.n))
    d = skew_symmetrizer(B)
    M = mutate_matrix(B, k)
    n = B.n
    assert all(d[i] * M.entries[i][j] == -d[j] * M.entries[j][i] for i in range(n) for j in range(n))
    assert all(M.entries[i][j] * M.entries[j][i] <= 0 for i in range(n) for j in range(n))


@settings(max_examples=200, deadline=None)
@given(exchange_matrices(), st.data())
def test_mutation_equivariance(B, data):
    k = data.draw(st.integers(1, B.n))
    sigma = data.draw(permutations(B.n))
    left = permute_matrix(sigma, mutate_matrix(B, k))
    right = mutate_matrix(permute_matrix(sigma, B), sigma[k - 1] + 1)
    assert left == right


@settings(max_examples=150, deadline=None)
@given(exchange_matrices(max_n=5), st.data())
def test_class_key_constant_on_orbits(B, data):
    sigma = data.draw(permutations(B.n))
    sign = data.draw(st.sampled_from([1, -1]))
    M = permute_matrix(sigma, B)
    assert class_key(M if sign > 0 else -M) == class_key(B)


@settings(max_examples=150, deadline=None)
@given(exchange_matrices(min_n=3, max_n=5, max_entry=1), exchange_matrices(min_n=3, max_n=5, max_entry=1))
def test_class_key_separates_classes(A, C):
    if A.n != C.n:
        return
    same_by_brute_force = brute_force_key(A) == brute_force_key(C)
    assert (class_key(A) == class_key(C)) == same_by_brute_force
    assert same_class(A, C) == same_by_brute_force


@settings(max_examples=100, deadline=None)
@given(exchange_matrices(min_n=3, max_n=5), st.data())
def test_class_key_separates_mutation_neighbours(B, data):
    # mutation neighbours are a richer source of near-misses than random pairs
    k = data.draw(st.integers(1, B.n))
    M = mutate_matrix(B, k)
    assert (class_key(B) == class_key(M)) == (brute_force_key(B) == brute_force_key(M))
