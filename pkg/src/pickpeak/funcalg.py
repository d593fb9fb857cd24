"""Closed-form expression trees for functions in the disc algebra.

An :class:`AnalyticExpr` denotes a function holomorphic on the open unit disc
and continuous on its closure.  Expressions are immutable values built from a
small set of node kinds (constants, the coordinate, field operations, Mobius
composition, principal roots, affine post-maps).  Construction certifies the
invariants that keep every node inside the disc algebra: quotient denominators
are checked nonvanishing on a grid of the closed disc, and principal-power
children are checked to take values in the disc Delta = {w : |w - 1/2| <= 1/2},
on which the principal branch of the m-th root is single valued.

Sup norms are reported by :func:`boundary_sup` as adaptive boundary-grid
estimates backed by the maximum modulus principle.  They are not rigorous
enclosures; the returned :class:`NormCertificate` keeps the refinement history
so callers can judge convergence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DegenerateExpressionError,
    DomainViolationError,
    ExpressionError,
    RangeViolationError,
)

EVAL_SLACK = 1e-12        # |z| may exceed 1 by at most this much
DENOM_EVAL_FLOOR = 1e-15  # evaluation-time denominator collapse threshold
DENOM_CERT_FLOOR = 1e-6   # construction-time grid floor for quotients
DELTA_SLACK = 1e-9        # allowed grid excursion outside Delta for roots
GRID_START = 2 ** 10      # first boundary grid for sup certificates
GRID_CAP = 2 ** 20        # largest boundary grid for sup certificates

_OPS = frozenset(
    {"constant", "identity", "sum", "difference", "product", "quotient",
     "mobius", "power", "affine"}
)


@dataclass(frozen=True, eq=False)
class AnalyticExpr:
    """Immutable expression node.  Build through the factory functions below;
    they enforce the construction-time certificates."""

    op: str
    args: tuple["AnalyticExpr", ...] = ()
    param: object = None

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __call__(self, z):
        return evaluate(self, z)


def _coerce(value) -> AnalyticExpr:
    if isinstance(value, AnalyticExpr):
        return value
    if isinstance(value, (int, float, complex)):
        return constant(value)
    raise TypeError(f"cannot use {type(value).__name__} as an expression")


def _require_finite(c: complex, what: str) -> complex:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ExpressionError(f"{what} must have finite components, got {c!r}")
    return c


# ---------------------------------------------------------------------------
# certification grid: boundary circle plus a polar sweep of the interior
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def boundary_grid(n: int) -> np.ndarray:
    """n equispaced points on the unit circle, starting at 1."""
    theta = 2.0 * np.pi * (np.arange(n) / n)
    return np.exp(1j * theta)


@lru_cache(maxsize=None)
def certification_points() -> np.ndarray:
    """Fixed sample of the closed disc used by construction certificates."""
    radii = np.arange(1, 33) / 33.0
    angles = np.exp(1j * 2.0 * np.pi * (np.arange(128) / 128.0))
    interior = np.outer(radii, angles).ravel()
    return np.concatenate(([0.0 + 0.0j], interior, boundary_grid(1024)))


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------

def constant(c) -> AnalyticExpr:
    return AnalyticExpr("constant", (), _require_finite(c, "constant"))


def identity() -> AnalyticExpr:
    return AnalyticExpr("identity")


def add(a: AnalyticExpr, b: AnalyticExpr) -> AnalyticExpr:
    return AnalyticExpr("sum", (a, b))


def sub(a: AnalyticExpr, b: AnalyticExpr) -> AnalyticExpr:
    return AnalyticExpr("difference", (a, b))


def mul(a: AnalyticExpr, b: AnalyticExpr) -> AnalyticExpr:
    return AnalyticExpr("product", (a, b))


def div(num: AnalyticExpr, den: AnalyticExpr) -> AnalyticExpr:
    """Quotient with a construction-time nonvanishing certificate for den."""
    vals = _raw_eval(den, certification_points())
    floor = float(np.min(np.abs(vals)))
    if floor <= DENOM_CERT_FLOOR:
        raise ExpressionError(
            f"quotient denominator not certified nonvanishing: grid minimum "
            f"modulus {floor:.3g} <= {DENOM_CERT_FLOOR:g}"
        )
    return AnalyticExpr("quotient", (num, den))


def mobius(a, child: AnalyticExpr) -> AnalyticExpr:
    """Compose the disc automorphism b_a(w) = (w - a)/(1 - conj(a) w) with child.

    Requires |a| < 1.  When the child maps into the closed disc the denominator
    is bounded below by 1 - |a| analytically; the grid check confirms the child
    actually stays bounded.
    """
    a = _require_finite(a, "mobius parameter")
    if abs(a) >= 1.0:
        raise ExpressionError(f"mobius parameter must satisfy |a| < 1, got |a| = {abs(a)}")
    vals = 1.0 - np.conj(a) * _raw_eval(child, certification_points())
    floor = float(np.min(np.abs(vals)))
    if floor <= 0.5 * (1.0 - abs(a)):
        raise ExpressionError(
            f"mobius denominator not certified: grid minimum modulus {floor:.3g} "
            f"below the analytic margin {0.5 * (1.0 - abs(a)):.3g}"
        )
    return AnalyticExpr("mobius", (child,), a)


def principal_root(expr: AnalyticExpr, m: int) -> AnalyticExpr:
    """Principal m-th root of an expression with range in Delta.

    The branch gamma is normalized by gamma(1) = 1 and extended continuously
    by gamma(0) = 0; Delta minus the origin lies in the open right half-plane,
    so the principal branch is single valued there.  The output has modulus
    |expr|^(1/m) pointwise.
    """
    if not isinstance(m, int) or m < 1:
        raise ExpressionError(f"root order must be a positive integer, got {m!r}")
    vals = _raw_eval(expr, certification_points())
    excursion = float(np.max(np.abs(vals - 0.5))) - 0.5
    if excursion > DELTA_SLACK:
        raise RangeViolationError(
            f"principal-power child leaves Delta by {excursion:.3g} "
            f"(> {DELTA_SLACK:g}) on the certification grid"
        )
    return AnalyticExpr("power", (expr,), m)


def affine(child: AnalyticExpr, scale, shift) -> AnalyticExpr:
    """Affine post-map w -> scale*w + shift."""
    scale = _require_finite(scale, "affine scale")
    shift = _require_finite(shift, "affine shift")
    return AnalyticExpr("affine", (child,), (scale, shift))


def int_power(base: AnalyticExpr, m: int) -> AnalyticExpr:
    """base**m for integer m >= 1, as a balanced product with shared subtrees."""
    if not isinstance(m, int) or m < 1:
        raise ExpressionError(f"integer power must be >= 1, got {m!r}")
    result = None
    square = base
    while m:
        if m & 1:
            result = square if result is None else mul(result, square)
        m >>= 1
        if m:
            square = mul(square, square)
    return result


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _raw_eval(expr: AnalyticExpr, z: np.ndarray) -> np.ndarray:
    return _eval_node(expr, z, {})


def _eval_node(expr: AnalyticExpr, z: np.ndarray, memo: dict) -> np.ndarray:
    key = id(expr)
    cached = memo.get(key)
    if cached is not None:
        return cached
    op = expr.op
    if op == "constant":
        out = np.full(z.shape, expr.param, dtype=complex)
    elif op == "identity":
        out = z
    elif op == "sum":
        out = _eval_node(expr.args[0], z, memo) + _eval_node(expr.args[1], z, memo)
    elif op == "difference":
        out = _eval_node(expr.args[0], z, memo) - _eval_node(expr.args[1], z, memo)
    elif op == "product":
        out = _eval_node(expr.args[0], z, memo) * _eval_node(expr.args[1], z, memo)
    elif op == "quotient":
        num = _eval_node(expr.args[0], z, memo)
        den = _eval_node(expr.args[1], z, memo)
        if np.min(np.abs(den)) < DENOM_EVAL_FLOOR:
            raise DegenerateExpressionError(
                "certified quotient denominator fell below "
                f"{DENOM_EVAL_FLOOR:g} in modulus at an evaluation point"
            )
        out = num / den
    elif op == "mobius":
        v = _eval_node(expr.args[0], z, memo)
        a = expr.param
        den = 1.0 - np.conj(a) * v
        if np.min(np.abs(den)) < DENOM_EVAL_FLOOR:
            raise DegenerateExpressionError(
                "mobius denominator fell below the evaluation floor"
            )
        out = (v - a) / den
    elif op == "power":
        v = _eval_node(expr.args[0], z, memo)
        m = expr.param
        zero = v == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(zero, 0.0 + 0.0j, np.exp(np.log(np.where(zero, 1.0, v)) / m))
    elif op == "affine":
        scale, shift = expr.param
        out = scale * _eval_node(expr.args[0], z, memo) + shift
    else:  # pragma: no cover - factories forbid unknown kinds
        raise ExpressionError(f"unknown node kind {op!r}")
    memo[key] = out
    return out


def evaluate(expr: AnalyticExpr, z):
    """Value of the denoted function at z, for |z| <= 1 + 1e-12.

    Accepts a complex scalar or a numpy array of points; arrays are evaluated
    vectorized with shared subexpressions computed once.
    """
    arr = np.asarray(z, dtype=complex)
    if arr.size and float(np.max(np.abs(arr))) > 1.0 + EVAL_SLACK:
        raise DomainViolationError(
            "evaluation point outside the closed unit disc "
            f"(max |z| = {float(np.max(np.abs(arr))):.17g})"
        )
    out = _eval_node(expr, arr, {})
    if not np.all(np.isfinite(out.real) & np.isfinite(out.imag)):
        raise DegenerateExpressionError("expression produced a non-finite value")
    if arr.ndim == 0:
        return complex(out[()])
    return out


# ---------------------------------------------------------------------------
# sup-norm certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormCertificate:
    """Grid-based boundary sup-norm estimate with its refinement history.

    History sups are non-decreasing because each doubled grid contains the
    previous one.  ``converged`` records whether the last two sups differ by
    less than ``tolerance``; when the grid cap is reached first the estimate
    is returned with ``converged`` False rather than raising.
    """

    grid_size: int
    boundary_sup: float
    refinement_history: tuple[tuple[int, float], ...]
    converged: bool
    tolerance: float


def boundary_sup(expr: AnalyticExpr, tol: float) -> NormCertificate:
    """Sample |expr| on doubling boundary grids until successive sups agree.

    Starts at 2**10 points and doubles up to 2**20.  The estimate never
    decreases under refinement; convergence means the last doubling moved the
    sup by less than tol.
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    history = []
    previous = None
    n = GRID_START
    converged = False
    while True:
        sup = float(np.max(np.abs(evaluate(expr, boundary_grid(n)))))
        history.append((n, sup))
        if previous is not None and sup - previous < tol:
            converged = True
            break
        if n >= GRID_CAP:
            break
        previous = sup
        n *= 2
    return NormCertificate(
        grid_size=n,
        boundary_sup=history[-1][1],
        refinement_history=tuple(history),
        converged=converged,
        tolerance=tol,
    )


def interior_polar_max(expr: AnalyticExpr, n_radial: int = 64, n_angular: int = 64) -> float:
    """Max modulus over an interior polar grid (plus the origin).

    By the maximum modulus principle this never exceeds the true boundary sup;
    it is the sanity counterpart of :func:`boundary_sup`.
    """
    radii = np.arange(1, n_radial + 1) / (n_radial + 1)
    angles = np.exp(1j * 2.0 * np.pi * (np.arange(n_angular) / n_angular))
    pts = np.concatenate(([0.0 + 0.0j], np.outer(radii, angles).ravel()))
    return float(np.max(np.abs(evaluate(expr, pts))))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _complex_obj(c: complex) -> dict:
    return {"re": c.real, "im": c.imag}


def _complex_from_obj(obj, where: str) -> complex:
    if not isinstance(obj, dict) or set(obj) != {"re", "im"}:
        raise ExpressionError(f"{where}: expected a {{re, im}} object, got {obj!r}")
    return complex(obj["re"], obj["im"])


def to_json_obj(expr: AnalyticExpr) -> dict:
    """Plain-dict form: {"op": kind, "args": [...], "param": ...}."""
    node: dict = {"op": expr.op, "args": [to_json_obj(a) for a in expr.args]}
    if expr.op == "constant" or expr.op == "mobius":
        node["param"] = _complex_obj(expr.param)
    elif expr.op == "power":
        node["param"] = expr.param
    elif expr.op == "affine":
        scale, shift = expr.param
        node["param"] = {"scale": _complex_obj(scale), "shift": _complex_obj(shift)}
    return node


def from_json_obj(obj) -> AnalyticExpr:
    """Rebuild an expression through the certifying factories."""
    if not isinstance(obj, dict) or "op" not in obj:
        raise ExpressionError(f"expected an expression node object, got {obj!r}")
    op = obj["op"]
    if op not in _OPS:
        raise ExpressionError(f"unknown node kind {op!r}")
    args = [from_json_obj(a) for a in obj.get("args", ())]
    param = obj.get("param")
    if op == "constant":
        return constant(_complex_from_obj(param, "constant param"))
    if op == "identity":
        return identity()
    if op == "sum":
        return add(*args)
    if op == "difference":
        return sub(*args)
    if op == "product":
        return mul(*args)
    if op == "quotient":
        return div(*args)
    if op == "mobius":
        return mobius(_complex_from_obj(param, "mobius param"), *args)
    if op == "power":
        if not isinstance(param, int):
            raise ExpressionError(f"power param must be an integer, got {param!r}")
        return principal_root(args[0], param)
    # affine
    if not isinstance(param, dict) or set(param) != {"scale", "shift"}:
        raise ExpressionError(f"affine param must carry scale and shift, got {param!r}")
    return affine(
        args[0],
        _complex_from_obj(param["scale"], "affine scale"),
        _complex_from_obj(param["shift"], "affine shift"),
    )


def serialize(expr: AnalyticExpr) -> str:
    """JSON text that round-trips bit-exactly through :func:`parse`."""
    return json.dumps(to_json_obj(expr), sort_keys=True)


def parse(text: str) -> AnalyticExpr:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExpressionError(f"expression text is not valid JSON: {exc}") from exc
    return from_json_obj(obj)
