"""User score functions over cost vectors.

A score function maps a path's cost vector to a scalar and must be strictly
monotone under dominance. Registration probes that property on random
dominated pairs and, for functions declared linear, probes additivity too.

Accepted specs:

* ``sum``                 plain sum (linear)
* ``sum_sq`` / ``sum_cube``  sum of squares / cubes
* ``sum_pow:Q``           sum of ``w_i ** Q`` for ``Q >= 1``
* ``weighted:a,b,...``    weighted sum with positive weights (linear)
* ``expr:<expression>``   arithmetic over ``w1..wd`` (``max``, ``min``,
  ``sqrt``, ``exp``, ``log1p`` and ``abs`` are available)
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .graph import CostVector

PROBES = 1000


class ScoreFunctionError(ValueError):
    pass


@dataclass
class ScoreFunction:
    """``evaluate`` takes a cost tuple; ``evaluate_many`` a ``(d, N)`` array."""

    name: str
    d: int
    evaluate: Callable[[Sequence], float]
    evaluate_many: Callable[[np.ndarray], np.ndarray]
    declared_linear: bool = False
    weights: tuple | None = field(default=None, repr=False)

    def __call__(self, cost: CostVector):
        return self.evaluate(cost)

    def edge_weight(self, cost: CostVector):
        """Per-edge scalar weight used by the linear fast path."""
        if not self.declared_linear:
            raise ScoreFunctionError(f"{self.name} is not linear")
        return self.evaluate(cost)


def _number(tok: str):
    try:
        return int(tok)
    except ValueError:
        val = float(tok)
        if not math.isfinite(val):
            raise ScoreFunctionError(f"non-finite number {tok!r}") from None
        return val


def _power(q) -> tuple[Callable, Callable]:
    if q == 2:
        def scalar(c):
            return sum(map(operator.mul, c, c))
    else:
        def scalar(c):
            return sum([x ** q for x in c])

    def many(arr):
        return (np.asarray(arr, dtype=np.float64) ** q).sum(axis=0)

    return scalar, many


def _weighted(weights: tuple) -> tuple[Callable, Callable]:
    wv = np.asarray(weights, dtype=np.float64)

    def scalar(c):
        return sum(a * x for a, x in zip(weights, c))

    def many(arr):
        arr = np.asarray(arr, dtype=np.float64)
        # 0 * inf would give nan; an infinite component means an infinite score
        out = np.tensordot(wv, np.where(np.isinf(arr), 0.0, arr), axes=1)
        return np.where(np.isinf(arr).any(axis=0), np.inf, out)

    return scalar, many


_ALLOWED_CALLS = {"max", "min", "sqrt", "exp", "log1p", "abs"}
_SCALAR_NS = {
    "max": max, "min": min, "sqrt": math.sqrt, "exp": math.exp, "log1p": math.log1p, "abs": abs,
}


def _vmax(*args):
    out = args[0]
    for a in args[1:]:
        out = np.maximum(out, a)
    return out


def _vmin(*args):
    out = args[0]
    for a in args[1:]:
        out = np.minimum(out, a)
    return out


_ARRAY_NS = {
    "max": _vmax, "min": _vmin, "sqrt": np.sqrt, "exp": np.exp, "log1p": np.log1p, "abs": np.abs,
}


def _check_expression(tree: ast.Expression, d: int) -> None:
    names = {f"w{i + 1}" for i in range(d)}
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load, ast.operator, ast.unaryop)):
            continue
        if isinstance(node, ast.BinOp):
            if not isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
                raise ScoreFunctionError(f"operator {type(node.op).__name__} not allowed")
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.UAdd, ast.USub)):
                raise ScoreFunctionError(f"operator {type(node.op).__name__} not allowed")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
                raise ScoreFunctionError(f"constant {node.value!r} not allowed")
        elif isinstance(node, ast.Name):
            if node.id not in names and node.id not in _ALLOWED_CALLS:
                raise ScoreFunctionError(f"unknown name {node.id!r} (expected w1..w{d})")
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
                raise ScoreFunctionError("only max/min/sqrt/exp/log1p/abs calls are allowed")
            if node.keywords:
                raise ScoreFunctionError("keyword arguments not allowed")
        else:
            raise ScoreFunctionError(f"syntax {type(node).__name__} not allowed")


def _expression(text: str, d: int) -> tuple[Callable, Callable]:
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ScoreFunctionError(f"cannot parse expression: {exc.msg}") from None
    _check_expression(tree, d)
    args = ", ".join(f"w{i + 1}" for i in range(d))
    code = compile(ast.fix_missing_locations(ast.Expression(body=ast.Lambda(
        args=ast.parse(f"lambda {args}: 0", mode="eval").body.args, body=tree.body,
    ))), "<score>", "eval")
    scalar_fn = eval(code, {"__builtins__": {}, **_SCALAR_NS})
    array_fn = eval(code, {"__builtins__": {}, **_ARRAY_NS})

    def scalar(c):
        try:
            return scalar_fn(*c)
        except OverflowError:
            return math.inf

    def many(arr):
        arr = np.asarray(arr, dtype=np.float64)
        with np.errstate(all="ignore"):
            out = np.asarray(array_fn(*arr), dtype=np.float64)
        return np.broadcast_to(out, arr.shape[1:]).copy()

    return scalar, many


def _probe_monotone(sf: ScoreFunction, rng: np.random.Generator) -> None:
    d = sf.d
    for _ in range(PROBES):
        a = rng.integers(0, 30, size=d)
        step = rng.integers(0, 4, size=d)
        step[rng.integers(d)] += 1
        a = tuple(int(x) for x in a)
        b = tuple(x + int(y) for x, y in zip(a, step))
        fa, fb = sf.evaluate(a), sf.evaluate(b)
        if not fa < fb:
            raise ScoreFunctionError(
                f"{sf.name} is not monotone increasing: f{a}={fa} >= f{b}={fb}"
            )


def _probe_linear(sf: ScoreFunction, rng: np.random.Generator) -> None:
    d = sf.d
    zero = sf.evaluate((0,) * d)
    if zero != 0:
        raise ScoreFunctionError(f"{sf.name} declared linear but f(0)={zero}")
    for _ in range(PROBES):
        a = tuple(int(x) for x in rng.integers(0, 50, size=d))
        b = tuple(int(x) for x in rng.integers(0, 50, size=d))
        ab = tuple(x + y for x, y in zip(a, b))
        lhs, rhs = sf.evaluate(ab), sf.evaluate(a) + sf.evaluate(b)
        if not math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12):
            raise ScoreFunctionError(f"{sf.name} declared linear but f(a+b) != f(a)+f(b)")


def register_score_function(spec: str, d: int, *, linear: bool | None = None, seed: int = 0) -> ScoreFunction:
    """Parse ``spec`` into a ScoreFunction of arity ``d`` and probe it.

    ``linear`` overrides the built-in linearity declaration; it defaults to
    True for ``sum``/``weighted`` and False otherwise. Expressions are never
    assumed linear unless ``linear=True`` is passed (and then probed).
    """
    if d < 1:
        raise ScoreFunctionError("d must be >= 1")
    spec = spec.strip()
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    weights = None
    if kind == "sum":
        weights = (1,) * d
        scalar, many = _weighted(weights)
        is_linear = True
    elif kind in ("sum_sq", "sum_cube"):
        scalar, many = _power(2 if kind == "sum_sq" else 3)
        is_linear = False
    elif kind == "sum_pow":
        q = _number(arg)
        if q < 1:
            raise ScoreFunctionError("sum_pow exponent must be >= 1")
        scalar, many = _power(q)
        is_linear = q == 1
    elif kind == "weighted":
        weights = tuple(_number(t) for t in arg.replace(",", " ").split())
        if len(weights) != d:
            raise ScoreFunctionError(f"weighted needs {d} weights, got {len(weights)}")
        scalar, many = _weighted(weights)
        is_linear = True
    elif kind == "expr":
        scalar, many = _expression(arg, d)
        is_linear = False
    else:
        raise ScoreFunctionError(f"unknown score function {spec!r}")
    if linear is not None:
        is_linear = linear
    sf = ScoreFunction(spec, d, scalar, many, is_linear, weights)
    rng = np.random.default_rng(seed)
    _probe_monotone(sf, rng)
    if is_linear:
        _probe_linear(sf, rng)
    return sf

