"""Peak functions and peak interpolation on finite subsets of the circle.

For a finite set E = {zeta_1, ..., zeta_N} on the unit circle, the Herglotz
sum H(z) = 1 + sum_k (zeta_k + z)/(zeta_k - z) has real part at least 1 on the
closed disc minus E and blows up at each zeta_k, so r = H/(1+H) is a rational
function of degree N in the disc algebra with r = 1 exactly on E and |r| < 1
everywhere else on the closed disc.  Clearing denominators, with
P = prod (zeta_k - z) and S = sum_k (zeta_k + z) prod_{i != k} (zeta_i - z),

    r = (P + S) / (2P + S) = 1 - P / (2P + S).

The second form is the one built here: P vanishes exactly at stored nodes, so
r evaluates to exactly 1 and its complement to exactly 0 on E in floating
point, which downstream residual guarantees rely on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import funcalg
from .errors import IllConditionedWarning, SearchExhaustedError
from .funcalg import AnalyticExpr

ANGLE_SEPARATION_FLOOR = 1e-10  # turns
PEAK_SNAP_RADIUS = 1e-12
POWER_CAP = 2 ** 20
LAGRANGE_WARN_SIZE = 12


def unit_point(angle_turns: float) -> complex:
    """exp(2 pi i angle).  Quarter turns map to 1, i, -1, -i exactly so the
    common fixtures are exactly representable."""
    quarter = {0.0: 1.0 + 0.0j, 0.25: 1.0j, 0.5: -1.0 + 0.0j, 0.75: -1.0j}
    if angle_turns in quarter:
        return quarter[angle_turns]
    theta = 2.0 * math.pi * angle_turns
    return complex(math.cos(theta), math.sin(theta))


@dataclass(frozen=True)
class FiniteBoundarySet:
    """Finite subset of the unit circle, stored as angles in [0, 1) turns."""

    angles: tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        object.__setattr__(self, "angles", angles)
        if len(angles) < 1:
            raise ValueError("boundary set must contain at least one point")
        for a in angles:
            if not math.isfinite(a) or not (0.0 <= a < 1.0):
                raise ValueError(f"angle {a!r} not in [0, 1) turns")
        ordered = sorted(angles)
        gaps = [b - a for a, b in zip(ordered, ordered[1:])]
        gaps.append(1.0 - ordered[-1] + ordered[0])
        if len(angles) > 1 and min(gaps) <= ANGLE_SEPARATION_FLOOR:
            raise ValueError(
                f"angular separation {min(gaps):.3g} turns below "
                f"{ANGLE_SEPARATION_FLOOR:g}"
            )

    def __len__(self):
        return len(self.angles)

    def points(self) -> tuple[complex, ...]:
        return tuple(unit_point(a) for a in self.angles)


@dataclass(frozen=True)
class BoundaryData:
    """Target values on a finite boundary set, sup norm at most 1."""

    set: FiniteBoundarySet
    values: tuple[complex, ...]

    def __post_init__(self):
        values = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != len(self.set):
            raise ValueError(
                f"{len(self.set)} boundary points but {len(values)} values"
            )
        worst = max(abs(v) for v in values)
        if worst > 1.0 + 1e-12:
            raise ValueError(f"boundary data norm {worst:.17g} exceeds 1")


@dataclass(frozen=True)
class PeakFunction:
    """Rational r with r = 1 exactly on the set and |r| < 1 off it.

    ``complement`` is the shared-subtree expression for 1 - r; it evaluates to
    exactly 0 at the stored boundary points.
    """

    expr: AnalyticExpr
    complement: AnalyticExpr
    set: FiniteBoundarySet

    def value_at(self, z: complex) -> complex:
        """Evaluate r with the continuous extension pinned on the set:
        points within 1e-12 of a set point return exactly 1."""
        if any(abs(z - p) <= PEAK_SNAP_RADIUS for p in self.set.points()):
            return 1.0 + 0.0j
        return funcalg.evaluate(self.expr, z)


def peak_function(eset: FiniteBoundarySet) -> PeakFunction:
    """Explicit degree-N peak function r = 1 - P/(2P + S) for the set."""
    points = eset.points()
    linears = [funcalg.sub(funcalg.constant(p), funcalg.identity()) for p in points]
    vanishing = reduce(funcalg.mul, linears)
    terms = []
    for k, p in enumerate(points):
        herglotz_num = funcalg.add(funcalg.constant(p), funcalg.identity())
        others = [lin for i, lin in enumerate(linears) if i != k]
        if others:
            terms.append(funcalg.mul(herglotz_num, reduce(funcalg.mul, others)))
        else:
            terms.append(herglotz_num)
    symmetric = reduce(funcalg.add, terms)
    denominator = funcalg.add(
        funcalg.mul(funcalg.constant(2.0), vanishing), symmetric
    )
    complement = funcalg.div(vanishing, denominator)
    expr = funcalg.sub(funcalg.constant(1.0), complement)
    return PeakFunction(expr, complement, eset)


def root_sequence(peak: PeakFunction, m: int) -> AnalyticExpr:
    """f_m = ((1 - r)/2)^(1/m): zero exactly on the set, sup norm at most 1,
    and |f_m| = |(1-r)/2|^(1/m) increasing toward 1 at every point off the set.
    """
    half_complement = funcalg.affine(peak.complement, 0.5, 0.0)
    return funcalg.principal_root(half_complement, m)


def lagrange_boundary(data: BoundaryData) -> AnalyticExpr:
    """The unique polynomial of degree < N through the boundary values.

    Built in product form with reciprocal node-difference constants; at a
    stored node every cross term carries an exact zero factor, so the node
    values are reproduced to within a few ulps.
    """
    points = data.set.points()
    n = len(points)
    if n > LAGRANGE_WARN_SIZE:
        warnings.warn(
            f"Lagrange interpolation on {n} boundary nodes may be "
            "ill-conditioned",
            IllConditionedWarning,
        )
    terms = []
    for k in range(n):
        factors = []
        for j in range(n):
            if j == k:
                continue
            factors.append(
                funcalg.mul(
                    funcalg.sub(funcalg.identity(), funcalg.constant(points[j])),
                    funcalg.constant(1.0 / (points[k] - points[j])),
                )
            )
        basis = reduce(funcalg.mul, factors) if factors else funcalg.constant(1.0)
        terms.append(funcalg.mul(funcalg.constant(data.values[k]), basis))
    return reduce(funcalg.add, terms)


def peak_interpolate(
    data: BoundaryData,
    smallness: float,
    avoid: AnalyticExpr,
    norm_slack: float,
    tol: float = 1e-9,
) -> AnalyticExpr:
    """h = p * r^m with exact boundary values, certified norm, and certified
    smallness away from the set.

    p is the interpolating polynomial and r the peak function; m is the
    smallest doubling power (cap 2**20) for which the certification grid
    confirms boundary_sup(h) <= 1 + norm_slack, and |h| < smallness at every
    grid point of the closed disc where |avoid| >= smallness.  Multiplication
    by r^m fixes the values on the set, so h there equals the data exactly.
    All-zero data short-circuits to the zero constant.
    """
    if not smallness > 0:
        raise ValueError(f"smallness must be positive, got {smallness}")
    if norm_slack < 0:
        raise ValueError(f"norm slack must be nonnegative, got {norm_slack}")
    if all(abs(v) == 0.0 for v in data.values):
        return funcalg.constant(0.0)

    polynomial = lagrange_boundary(data)
    peak = peak_function(data.set)

    grid = funcalg.certification_points()
    boundary_part = np.abs(grid) > 1.0 - 1e-12
    poly_vals = funcalg.evaluate(polynomial, grid)
    peak_vals = funcalg.evaluate(peak.expr, grid)
    needs_smallness = np.abs(funcalg.evaluate(avoid, grid)) >= smallness

    m = 1
    while m <= POWER_CAP:
        h_vals = poly_vals * peak_vals ** m
        h_abs = np.abs(h_vals)
        norm_ok = float(np.max(h_abs[boundary_part])) <= 1.0 + norm_slack + tol
        small_ok = bool(np.all(h_abs[needs_smallness] < smallness))
        if norm_ok and small_ok:
            h = funcalg.mul(polynomial, funcalg.int_power(peak.expr, m))
            certificate = funcalg.boundary_sup(h, tol)
            if certificate.boundary_sup <= 1.0 + norm_slack + certificate.tolerance:
                return h
        m *= 2
    raise SearchExhaustedError("peak interpolation power search", POWER_CAP)
