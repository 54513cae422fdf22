"""T-periodic logistic states and the monotone upper/lower iteration.

Periodic solutions are obtained by marching the parabolic flow to its
periodic attractor (the convergence of that process is exactly what makes
these states attracting, so the march doubles as a correctness witness).
The scalar periodic logistic ODE has a closed form via quadrature and backs
the half-line tail bounds.  The alternating upper/lower iteration produces
the extremal periodic coexistence pairs bracketing every positive periodic
solution of the competition system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import cumulative_simpson

from .eigen import principal_eigenvalue
from .errors import NonConvergenceError, PreconditionError, TruncationError
from .fields import (BoundaryOp, CompetitionParams, PeriodicField,
                     check_condition_H1)
from .parabolic import Grid1D, Profile, step_imex
from .profiles import PeriodicProfile


# ----------------------------------------------------------------------------
# scalar periodic logistic ODE, closed form
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicScalarOde:
    """Positive T-periodic solution of z' = z (c(t) - z)."""

    period: float
    t_grid: np.ndarray
    c_values: np.ndarray
    z_values: np.ndarray
    residual: float

    def value(self, t) -> np.ndarray:
        tr = np.mod(t, self.period)
        return np.interp(tr, self.t_grid, self.z_values)

    @property
    def mean(self) -> float:
        return float(np.trapezoid(self.z_values, self.t_grid) / self.period)


def periodic_logistic_ode(c: Callable[[float], float], T: float,
                          n_quad: int = 2048) -> PeriodicScalarOde:
    """Closed-form periodic logistic solution via composite-Simpson quadrature.

    With C(t) the running integral of c, the unique positive periodic
    solution is z(t) = e^{C(t)} z0 / (1 + z0 * int_0^t e^{C}), where
    z0 = (e^{C(T)} - 1) / int_0^T e^{C}.  Requires mean(c) > 0.
    """
    if n_quad < 512:
        n_quad = 512
    ts = np.linspace(0.0, T, n_quad + 1)
    cv = np.array([float(c(t)) for t in ts])
    C = cumulative_simpson(cv, x=ts, initial=0.0)
    if C[-1] <= 0:
        raise PreconditionError(
            f"mean growth {C[-1] / T:.4g} <= 0: no positive periodic solution")
    expC = np.exp(C)
    I = cumulative_simpson(expC, x=ts, initial=0.0)
    z0 = (expC[-1] - 1.0) / I[-1]
    z = expC * z0 / (1.0 + z0 * I)

    # residual of z' = z (c - z) from a 4th-order periodic difference
    dt = T / n_quad
    zp = np.empty_like(z)
    zi = z[:-1]  # one period, periodic wrap
    zp[:-1] = (np.roll(zi, -2) - 8 * np.roll(zi, -1)
               + 8 * np.roll(zi, 1) - np.roll(zi, 2)) / (-12.0 * dt)
    zp[-1] = zp[0]
    residual = float(np.max(np.abs(zp - z * (cv - z))))
    return PeriodicScalarOde(period=T, t_grid=ts, c_values=cv,
                             z_values=z, residual=residual)


# ----------------------------------------------------------------------------
# periodic logistic PDE: march to the attractor
# ----------------------------------------------------------------------------

def _march_periodic(grid: Grid1D, d: float, rows: np.ndarray,
                    bc_left: BoundaryOp, right_bc: tuple[str, float],
                    T: float, tol: float, max_periods: int,
                    w0: np.ndarray) -> PeriodicProfile:
    """March w_t = d w_xx + w (c - w) to its periodic attractor.

    ``rows[k]`` holds c(t_k, .) for the nt steps of one period.  Returns the
    final recorded period once consecutive period-start slices agree in sup
    norm below tol.
    """
    nt = rows.shape[0]
    dt = T / nt
    w = Profile(grid, np.asarray(w0, dtype=float))

    def reaction(k):
        row = rows[k]
        return lambda t, x, wv: wv * (row - wv)

    prev = w.values.copy()
    residual = np.inf
    for _ in range(max_periods):
        for k in range(nt):
            w = step_imex(w, d, None, reaction(k), bc_left, right_bc,
                          k * dt, dt)
        residual = float(np.max(np.abs(w.values - prev)))
        if residual < tol:
            break
        prev = w.values.copy()
    else:
        raise NonConvergenceError(
            f"periodic attractor not reached in {max_periods} periods",
            residual=residual)

    slices = np.empty((nt + 1, grid.n + 1))
    slices[0] = w.values
    for k in range(nt):
        w = step_imex(w, d, None, reaction(k), bc_left, right_bc, k * dt, dt)
        slices[k + 1] = w.values
    period_residual = float(np.max(np.abs(slices[-1] - slices[0])))
    slices = np.clip(slices, 0.0, None)
    return PeriodicProfile(times=np.linspace(0.0, T, nt + 1), grid=grid,
                           values=slices, period_residual=period_residual,
                           tolerance=max(10 * tol, 10 * period_residual))


def _field_rows(c: PeriodicField, grid: Grid1D, nt: int) -> np.ndarray:
    dt = c.period / nt
    return np.array([c(k * dt, grid.nodes) for k in range(nt)])


def periodic_logistic_pde(ell: float, d: float, c: PeriodicField,
                          bc: BoundaryOp,
                          right_value: Union[str, float] = "zero",
                          resolution: tuple[int, int] = (128, 128),
                          tol: float = 1e-8, max_periods: int = 2000,
                          eigen_resolution: tuple[int, int] = (128, 128)
                          ) -> PeriodicProfile:
    """Positive periodic logistic state on (0, ell).

    ``right_value`` is "zero" (homogeneous Dirichlet; requires the principal
    eigenvalue to be negative) or a positive constant K >= sup|c| pinned at
    x = ell.
    """
    lam = principal_eigenvalue(ell, d, c, bc, resolution=eigen_resolution,
                               strict=False).lambda1
    if lam >= 0:
        raise PreconditionError(
            f"lambda1({ell:.4g}) = {lam:.4g} >= 0: no positive periodic "
            "state on this interval")
    nx, nt = resolution
    grid = Grid1D(nx, ell)
    sup_c = c.sup_bound(ell)
    if right_value == "zero":
        right_bc = ("dirichlet", 0.0)
        start = max(1.0, sup_c)
    else:
        K = float(right_value)
        if K < sup_c * (1 - 1e-12):
            raise PreconditionError(
                f"right value K = {K:.4g} must be >= sup|c| = {sup_c:.4g}")
        right_bc = ("dirichlet", K)
        start = K
    rows = _field_rows(c, grid, nt)
    w0 = np.full(grid.n + 1, start)
    return _march_periodic(grid, d, rows, bc, right_bc, c.period, tol,
                           max_periods, w0)


def periodic_logistic_halfline(d: float, c: PeriodicField, bc: BoundaryOp,
                               L: float,
                               resolution: tuple[int, int] = (256, 64),
                               tol: float = 1e-8, max_periods: int = 2000,
                               check_truncation: bool = True,
                               truncation_tol: float = 1e-3
                               ) -> PeriodicProfile:
    """Periodic logistic state on the half line, truncated to [0, L].

    The artificial right condition is homogeneous Neumann at L.  With
    ``check_truncation`` the profile is recomputed on [0, 2L] and the
    relative change on [0, L/2] must stay below ``truncation_tol``.
    """
    if c.tail is None:
        raise PreconditionError("half-line problems need tail metadata on c")
    if L < 4.0 * c.tail.x_tail:
        raise PreconditionError(
            f"truncation L = {L:.4g} must be >= 4 * x_tail = "
            f"{4 * c.tail.x_tail:.4g}")
    nx, nt = resolution
    grid = Grid1D(nx, L)
    rows = _field_rows(c, grid, nt)
    w0 = np.full(grid.n + 1, max(1.0, c.sup_bound(L)))
    prof = _march_periodic(grid, d, rows, bc, ("neumann", 0.0), c.period,
                           tol, max_periods, w0)
    if check_truncation:
        wide = periodic_logistic_halfline(
            d, c, bc, 2 * L, resolution=(2 * nx, nt), tol=tol,
            max_periods=max_periods, check_truncation=False)
        half = grid.n // 2 + 1
        ref = np.max(np.abs(prof.values[:, :half]))
        diff = np.max(np.abs(prof.values[:, :half]
                             - wide.values[:, :half]))
        if diff > truncation_tol * max(ref, 1e-12):
            raise TruncationError(
                f"profile changes by {diff:.3e} (relative "
                f"{diff / max(ref, 1e-12):.3e}) when the domain is doubled; "
                "increase L")
    return prof


# ----------------------------------------------------------------------------
# extremal periodic coexistence states by alternating iteration
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtremalStates:
    """The two extremal periodic pairs and the iteration diagnostics.

    ``u_upper``/``v_lower`` converge from the decoupled upper state of u,
    ``u_lower``/``v_upper`` from the decoupled upper state of v; every
    positive periodic solution is sandwiched between them.
    """

    u_upper: PeriodicProfile   # U*
    v_lower: PeriodicProfile   # V_*
    u_lower: PeriodicProfile   # U_*
    v_upper: PeriodicProfile   # V^*
    iterations: int
    ordering_certificate: float  # max violation of the monotone chains


def monotone_iteration(a: PeriodicField, b: PeriodicField,
                       params: CompetitionParams, L: float,
                       resolution: tuple[int, int] = (256, 64),
                       max_iters: int = 60, tol: float = 1e-6,
                       march_tol: float = 1e-8,
                       max_periods: int = 2000) -> ExtremalStates:
    """Alternating scalar solves producing the extremal periodic pairs.

    Seeds with the decoupled states, then alternates: the upper u iterate
    sees the current lower v, the lower v iterate the new upper u, and
    symmetrically for the other pair.  All iterates live on one shared
    (t, x) lattice, so coupling fields are formed by plain grid arithmetic.
    """
    verdict = check_condition_H1(a, b, params)
    if not verdict.holds:
        raise PreconditionError(
            f"weak-competition condition {verdict.verdict}: {verdict.witness}")
    T = a.period
    nx, nt = resolution
    grid = Grid1D(nx, L)
    rows_a = _field_rows(a, grid, nt)
    rows_b = _field_rows(b, grid, nt)
    k, h = params.k, params.h

    def solve(rows, d, bc, start):
        return _march_periodic(grid, d, rows, bc, ("neumann", 0.0), T,
                               march_tol, max_periods, start)

    sup_a = float(np.max(np.abs(rows_a)))
    sup_b = float(np.max(np.abs(rows_b)))
    ones = np.full(grid.n + 1, 1.0)

    u_up = solve(rows_a, params.d1, params.bc1, max(1.0, sup_a) * ones)
    v_up = solve(rows_b, params.d2, params.bc2, max(1.0, sup_b) * ones)
    v_lo = solve(rows_b - h * u_up.values[:nt], params.d2, params.bc2,
                 v_up.values[0])
    u_lo = solve(rows_a - k * v_up.values[:nt], params.d1, params.bc1,
                 u_up.values[0])

    chain_violation = max(
        float(np.max(u_lo.values - u_up.values)),
        float(np.max(v_lo.values - v_up.values)), 0.0)

    iters = 0
    for iters in range(1, max_iters + 1):
        u_up_n = solve(rows_a - k * v_lo.values[:nt], params.d1, params.bc1,
                       u_up.values[0])
        v_lo_n = solve(rows_b - h * u_up_n.values[:nt], params.d2, params.bc2,
                       v_lo.values[0])
        v_up_n = solve(rows_b - h * u_lo.values[:nt], params.d2, params.bc2,
                       v_up.values[0])
        u_lo_n = solve(rows_a - k * v_up_n.values[:nt], params.d1, params.bc1,
                       u_lo.values[0])

        # the update direction is monotone; a reversal means the lattice is
        # too coarse to support the comparison structure
        drift = max(float(np.max(u_up_n.values - u_up.values)),
                    float(np.max(v_up_n.values - v_up.values)),
                    float(np.max(u_lo.values - u_lo_n.values)),
                    float(np.max(v_lo.values - v_lo_n.values)))
        if drift > 1e-8 + 10 * march_tol:
            raise NonConvergenceError(
                f"monotone update reversed by {drift:.3e}; refine the "
                "space-time resolution")
        chain_violation = max(
            chain_violation,
            float(np.max(u_lo_n.values - u_up_n.values)),
            float(np.max(v_lo_n.values - v_up_n.values)))

        delta = max(u_up.sup_distance(u_up_n), v_lo.sup_distance(v_lo_n),
                    u_lo.sup_distance(u_lo_n), v_up.sup_distance(v_up_n))
        u_up, v_lo, u_lo, v_up = u_up_n, v_lo_n, u_lo_n, v_up_n
        if delta < tol:
            break
    else:
        raise NonConvergenceError(
            f"alternating iteration did not settle in {max_iters} rounds")

    return ExtremalStates(u_upper=u_up, v_lower=v_lo, u_lower=u_lo,
                          v_upper=v_up, iterations=iters,
                          ordering_certificate=max(chain_violation, 0.0))


# ----------------------------------------------------------------------------
# ODE tail bounds for the r = 0 case
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class OdeBoundSet:
    """Far-field ODE brackets: w1 <= U <= w2 and z1 <= V <= z2 at infinity."""

    w1: PeriodicScalarOde
    w2: PeriodicScalarOde
    z1: PeriodicScalarOde
    z2: PeriodicScalarOde


def ode_bound_set(a: PeriodicField, b: PeriodicField,
                  k: float, h: float) -> OdeBoundSet:
    """Periodic ODE solutions bounding the coexistence states at infinity."""
    for nm, f in (("a", a), ("b", b)):
        if f.tail is None or f.tail.r != 0.0:
            raise PreconditionError(f"field {nm} needs an r = 0 tail")
    T = a.period

    def solve(name, c):
        try:
            return periodic_logistic_ode(c, T)
        except PreconditionError as exc:
            raise PreconditionError(
                f"bound {name} has nonpositive mean growth: {exc}") from exc

    w2 = solve("w2", a.tail.upper)
    z1 = solve("z1", lambda t: b.tail.lower(t) - h * float(w2.value(t)))
    z2 = solve("z2", b.tail.upper)
    w1 = solve("w1", lambda t: a.tail.lower(t) - k * float(z2.value(t)))
    return OdeBoundSet(w1=w1, w2=w2, z1=z1, z2=z2)
