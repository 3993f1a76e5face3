import math

import numpy as np
import pytest

from mcroute.scoring import ScoreFunctionError, register_score_function


@pytest.mark.parametrize("spec, cost, want", [
    ("sum", (1, 2, 3), 6),
    ("sum_sq", (1, 2, 3), 14),
    ("sum_cube", (1, 2, 3), 36),
    ("sum_pow:4", (1, 2, 3), 98),
    ("weighted:1,2,3", (1, 2, 3), 14),
    ("expr:w1 * w1 + 2 * w2 + w3 + max(w3, w1)", (1, 2, 3), 11),
])
def test_specs_evaluate_exactly(spec, cost, want):
    f = register_score_function(spec, 3)
    assert f(cost) == want
    assert f.evaluate_many(np.asarray(cost, dtype=float).reshape(3, 1))[0] == want


def test_vectorised_matches_scalar():
    rng = np.random.default_rng(0)
    pts = rng.integers(0, 40, size=(3, 200))
    for spec in ("sum_sq", "sum_cube", "weighted:2,1,5", "expr:sqrt(w1) + w2 * w3 + w1 + w2 + w3"):
        f = register_score_function(spec, 3)
        many = f.evaluate_many(pts)
        for j in range(pts.shape[1]):
            assert math.isclose(many[j], f(tuple(int(x) for x in pts[:, j])), rel_tol=1e-12)


def test_infinite_components_give_infinite_scores():
    arr = np.array([[1.0, np.inf], [2.0, 3.0]])
    for spec in ("sum_sq", "weighted:1,2", "sum"):
        out = register_score_function(spec, 2).evaluate_many(arr)
        assert out[0] < math.inf and out[1] == math.inf


def test_linearity_declarations():
    assert register_score_function("sum", 2).declared_linear
    assert register_score_function("weighted:1,4", 2).declared_linear
    assert not register_score_function("sum_sq", 2).declared_linear
    assert not register_score_function("expr:w1 + w2", 2).declared_linear
    assert register_score_function("expr:w1 + w2", 2, linear=True).declared_linear
    with pytest.raises(ScoreFunctionError, match="linear"):
        register_score_function("sum_sq", 2, linear=True)


@pytest.mark.parametrize("spec, fragment", [
    ("nope", "unknown score function"),
    ("weighted:1,2", "needs 3 weights"),
    ("weighted:1,0,1", "not monotone"),
    ("sum_pow:0.5", "exponent"),
    ("expr:w1 - w2 + w3", "not allowed|not monotone"),
    ("expr:__import__('os')", "allowed|unknown name"),
    ("expr:w1.real + w2 + w3", "not allowed"),
    ("expr:w4 + w1", "unknown name"),
    ("expr:max(w1, w2", "cannot parse"),
    ("expr:w1 + w2", "not monotone"),
])
def test_bad_specs_are_rejected(spec, fragment):
    with pytest.raises(ScoreFunctionError, match=fragment):
        register_score_function(spec, 3)


def test_edge_weight_only_for_linear():
    assert register_score_function("weighted:2,3", 2).edge_weight((1, 1)) == 5
    with pytest.raises(ScoreFunctionError):
        register_score_function("sum_sq", 2).edge_weight((1, 1))
