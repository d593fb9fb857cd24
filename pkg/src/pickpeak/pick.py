"""Pick matrices, PSD feasibility, Schur-recursion synthesis, minimal norms.

The classical interior interpolation problem asks for f holomorphic on the
open disc with sup norm at most 1 and f(z_j) = w_j.  Solvability is equivalent
to positive semidefiniteness of the Pick matrix with entries
(1 - w_j conj(w_k)) / (1 - z_j conj(z_k)); when solvable, a rational solution
of degree at most n is produced by a Schur recursion whose base case is the
zero function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import funcalg
from .errors import (
    BudgetExhaustedWarning,
    ComputationError,
    ExpressionError,
    UnsolvableError,
)
from .funcalg import AnalyticExpr, NormCertificate

NODE_DISTINCTNESS_FLOOR = 1e-12
NODE_BOUNDARY_MARGIN = 1e-10
CERTIFICATE_TOL_FLOOR = 1e-7  # internal certificates need not refine past this


@dataclass(frozen=True)
class PickData:
    """Interior nodes z_j with targets w_j; lengths must match, n >= 0."""

    nodes: tuple[complex, ...]
    targets: tuple[complex, ...]

    def __post_init__(self):
        nodes = tuple(complex(z) for z in self.nodes)
        targets = tuple(complex(w) for w in self.targets)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "targets", targets)
        if len(nodes) != len(targets):
            raise ValueError(
                f"{len(nodes)} nodes but {len(targets)} targets"
            )
        for z in nodes:
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError(f"non-finite node {z!r}")
            if abs(z) > 1.0 - NODE_BOUNDARY_MARGIN:
                raise ValueError(
                    f"node {z!r} too close to the boundary circle "
                    f"(|z| must be <= 1 - {NODE_BOUNDARY_MARGIN:g})"
                )
        for w in targets:
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                raise ValueError(f"non-finite target {w!r}")
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                if abs(nodes[i] - nodes[j]) <= NODE_DISTINCTNESS_FLOOR:
                    raise ValueError(
                        f"nodes {i} and {j} closer than {NODE_DISTINCTNESS_FLOOR:g}"
                    )

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Square complex matrix with exact conjugate symmetry as constructed."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if not np.array_equal(m, m.conj().T):
            raise ValueError("matrix is not exactly Hermitian")
        object.__setattr__(self, "entries", m)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(self.entries.trace().real)


@dataclass(frozen=True)
class PsdVerdict:
    kind: Literal["psd", "not-psd", "marginal"]
    min_eigenvalue: float


@dataclass(frozen=True)
class SolverResult:
    """Schur-recursion output: the interpolant, its pointwise residuals, a
    boundary-norm certificate, and whether any step grazed the unit circle."""

    solution: AnalyticExpr
    residuals: tuple[float, ...]
    norm_certificate: NormCertificate
    marginal: bool


def build_pick_matrix(data: PickData) -> HermitianMatrix:
    """Entries (1 - w_j conj(w_k)) / (1 - z_j conj(z_k)).

    The strict lower triangle is mirrored from the upper one so conjugate
    symmetry holds exactly in floating point.
    """
    n = len(data)
    m = np.zeros((n, n), dtype=complex)
    z = data.nodes
    w = data.targets
    for j in range(n):
        for k in range(j, n):
            m[j, k] = (1.0 - w[j] * w[k].conjugate()) / (1.0 - z[j] * z[k].conjugate())
            if k != j:
                m[k, j] = m[j, k].conjugate()
    return HermitianMatrix(m)


def is_psd(matrix: HermitianMatrix, tol: float) -> PsdVerdict:
    """Classify by the minimum eigenvalue, scaled by 1 + trace.

    psd when lambda_min >= -tol*(1+trace); not-psd below -1e3*tol*(1+trace);
    marginal in the three-decade buffer between.
    """
    if matrix.order == 0:
        return PsdVerdict("psd", 0.0)
    try:
        eigenvalues = np.linalg.eigvalsh(matrix.entries)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(f"Hermitian eigensolver failed: {exc}") from exc
    lam = float(eigenvalues[0])
    scale = tol * (1.0 + matrix.trace)
    if lam >= -scale:
        kind = "psd"
    elif lam < -1e3 * scale:
        kind = "not-psd"
    else:
        kind = "marginal"
    return PsdVerdict(kind, lam)


# ---------------------------------------------------------------------------
# Schur recursion
# ---------------------------------------------------------------------------

def _phi(a: complex, w: complex, depth: int) -> complex:
    """Disc automorphism (w - a)/(1 - conj(a) w) on scalars."""
    den = 1.0 - a.conjugate() * w
    if abs(den) < 1e-15:
        raise UnsolvableError(depth, "target automorphism degenerated")
    return (w - a) / den


def schur_reduce(data: PickData, tol: float) -> PickData:
    """One reduction step: trade the first node for an (n-1)-point problem.

    New targets are phi_{w_1}(w_j) / b_{z_1}(z_j); solvability is preserved.
    """
    if len(data) < 1:
        raise ValueError("nothing to reduce")
    z1, w1 = data.nodes[0], data.targets[0]
    if abs(w1) > 1.0 + tol:
        raise UnsolvableError(0, f"target modulus {abs(w1):.6g} exceeds 1 + tol")
    reduced = []
    for z_j, w_j in zip(data.nodes[1:], data.targets[1:]):
        blaschke = (z_j - z1) / (1.0 - z1.conjugate() * z_j)
        reduced.append(_phi(w1, w_j, 0) / blaschke)
    return PickData(data.nodes[1:], tuple(reduced))


def _schur_solve(nodes, targets, tol, depth) -> tuple[AnalyticExpr, bool]:
    if not nodes:
        return funcalg.constant(0.0), False
    z1, w1 = nodes[0], targets[0]
    if abs(w1) > 1.0 + tol:
        raise UnsolvableError(
            depth, f"reduced target modulus {abs(w1):.6g} exceeds 1 + tol"
        )
    if abs(abs(w1) - 1.0) <= tol:
        # unimodular target forces the constant; remaining data must agree
        for j, w_j in enumerate(targets[1:], start=1):
            if abs(w_j - w1) > tol:
                raise UnsolvableError(
                    depth,
                    f"forced constant {w1!r} conflicts with target {j} ({w_j!r})",
                )
        return funcalg.constant(w1), True
    reduced = []
    for z_j, w_j in zip(nodes[1:], targets[1:]):
        blaschke = (z_j - z1) / (1.0 - z1.conjugate() * z_j)
        reduced.append(_phi(w1, w_j, depth) / blaschke)
    inner, marginal = _schur_solve(nodes[1:], tuple(reduced), tol, depth + 1)
    blaschke_expr = funcalg.mobius(z1, funcalg.identity())
    outer = funcalg.mobius(-w1, funcalg.mul(blaschke_expr, inner))
    return outer, marginal


def solve_pick(data: PickData, tol: float) -> SolverResult:
    """Synthesize an interpolant of sup norm at most 1 by Schur reduction.

    n = 0 yields the zero constant.  A unimodular (within tol) leading target
    forces a constant and sets the marginal flag.  A reduced target outside
    the closed disc by more than tol raises UnsolvableError with the failing
    recursion depth.
    """
    try:
        expr, marginal = _schur_solve(data.nodes, data.targets, tol, 0)
    except ExpressionError as exc:
        # a certificate failure inside back-substitution means the data sits
        # too close to the solvability boundary for this arithmetic
        raise UnsolvableError(0, f"back-substitution degenerated: {exc}") from exc
    residuals = tuple(
        abs(funcalg.evaluate(expr, z) - w) for z, w in zip(data.nodes, data.targets)
    )
    certificate = funcalg.boundary_sup(expr, max(tol, CERTIFICATE_TOL_FLOOR))
    return SolverResult(expr, residuals, certificate, marginal)


# ---------------------------------------------------------------------------
# minimal interpolation norm
# ---------------------------------------------------------------------------

def minimal_norm(data: PickData, tol: float) -> float:
    """Smallest t (within tol) with (z_j, w_j/t) solvable in the unit ball.

    Feasibility in t is upward closed, so bisection between the analytic
    lower bound max|w_j| and a doubling upper bound is valid.  Returns 0 for
    all-zero targets.
    """
    if len(data) == 0:
        raise ValueError("minimal_norm needs at least one node")
    peak = max(abs(w) for w in data.targets)
    if peak == 0.0:
        return 0.0

    def feasible(t: float) -> bool:
        scaled = PickData(data.nodes, tuple(w / t for w in data.targets))
        return is_psd(build_pick_matrix(scaled), 1e-12).kind != "not-psd"

    lo = peak
    if feasible(lo):
        return lo
    hi = 2.0 * peak
    while not feasible(hi):
        hi *= 2.0
        if hi > peak * 2.0 ** 60:  # pragma: no cover - always feasible eventually
            raise ComputationError("minimal-norm upper bound search ran away")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# independent brute-force oracle
# ---------------------------------------------------------------------------

def _blaschke_values(params: np.ndarray, degree: int, z: np.ndarray) -> np.ndarray:
    """Values of e^{i phi} * prod (z - a_k)/(1 - conj(a_k) z) at the nodes."""
    out = np.exp(1j * params[0]) * np.ones_like(z)
    for k in range(degree):
        a = complex(params[1 + 2 * k], params[2 + 2 * k])
        out = out * (z - a) / (1.0 - a.conjugate() * z)
    return out


def _project(params: np.ndarray, degree: int) -> np.ndarray:
    for k in range(degree):
        a = complex(params[1 + 2 * k], params[2 + 2 * k])
        if abs(a) > 0.98:
            a *= 0.98 / abs(a)
            params[1 + 2 * k] = a.real
            params[2 + 2 * k] = a.imag
    return params


def _best_residual(data: PickData, t: float, degree: int, restarts: int,
                   rng: np.random.Generator) -> float:
    """Coordinate-descent estimate of min over Blaschke params of the max
    residual of t * B against the targets."""
    z = np.asarray(data.nodes)
    w = np.asarray(data.targets)

    def objective(params):
        return float(np.max(np.abs(t * _blaschke_values(params, degree, z) - w)))

    dim = 1 + 2 * degree
    best = math.inf
    for _ in range(restarts):
        params = np.zeros(dim)
        params[0] = rng.uniform(0.0, 2.0 * math.pi)
        for k in range(degree):
            radius = math.sqrt(rng.uniform(0.0, 0.81))
            angle = rng.uniform(0.0, 2.0 * math.pi)
            params[1 + 2 * k] = radius * math.cos(angle)
            params[2 + 2 * k] = radius * math.sin(angle)
        value = objective(params)
        step = 0.3
        while step > 1e-6:
            improved = False
            for axis in range(dim):
                for sign in (1.0, -1.0):
                    trial = params.copy()
                    trial[axis] += sign * step
                    trial = _project(trial, degree)
                    trial_value = objective(trial)
                    if trial_value < value:
                        params, value = trial, trial_value
                        improved = True
            if not improved:
                step *= 0.5
        best = min(best, value)
    return best


def brute_force_oracle(data: PickData, max_degree: int, samples: int) -> float:
    """Least sup norm achieving residuals below 1e-3, by randomized search
    over scaled finite Blaschke products.

    Independent of the Schur recursion: candidates are t * e^{i phi} * B with
    B a Blaschke product of degree <= max_degree, evaluated directly.  The
    inner search accepts at a stricter 1e-4 residual so the reported norm sits
    within about 1e-3 of the true minimum.  ``samples`` is the number of
    random restarts per (t, degree) probe.
    """
    if len(data) > 4 or max_degree > 4:
        raise ValueError("oracle is for desk-scale data: n <= 4, degree <= 4")
    if len(data) == 0 or all(abs(w) == 0.0 for w in data.targets):
        return 0.0
    rng = np.random.default_rng(1789)
    accept = 1e-4

    def feasible(t: float) -> bool:
        return any(
            _best_residual(data, t, d, samples, rng) < accept
            for d in range(max_degree + 1)
        )

    lo = max(abs(w) for w in data.targets)
    if feasible(lo):
        return lo
    hi = 2.0 * lo
    doublings = 0
    while not feasible(hi):
        hi *= 2.0
        doublings += 1
        if doublings > 12:
            warnings.warn(
                "oracle search budget exhausted before bracketing feasibility",
                BudgetExhaustedWarning,
            )
            return hi
    while hi - lo > accept:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi
