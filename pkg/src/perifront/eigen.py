"""Principal eigenvalue of the T-periodic problem via the period map.

The eigenvalue lambda1(ell; d, c) of

    phi_t - d phi_xx - c(t, x) phi = lambda phi,  B[phi](t,0) = 0,
    phi(t, ell) = 0, phi T-periodic,

is obtained by power iteration on the Poincare (one-period) map of the
linear evolution phi_t = d phi_xx + c phi: the principal eigenpair of the
periodic problem corresponds to the dominant positive eigenvalue rho of
that map, and lambda1 = -ln(rho)/T.  The linear evolution itself is stepped
with Crank-Nicolson so the map is resolved to second order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BracketError, NonConvergenceError, NoThresholdError
from .fields import BoundaryOp, CompetitionParams, PeriodicField
from .parabolic import Grid1D, step_linear_be, step_linear_cn
from .profiles import PeriodicProfile


class ConditionAWarning(UserWarning):
    """Raised when a critical length is computed without verified tail data."""


@dataclass(frozen=True)
class EigenResult:
    lambda1: float
    eigenfunction: Optional[PeriodicProfile]
    ell: float
    iterations: int
    residual: float
    converged: bool = True


def principal_eigenvalue(ell: float, d: float, c: PeriodicField, bc: BoundaryOp,
                         resolution: tuple[int, int] = (256, 512),
                         max_iter: int = 500, ratio_tol: float = 1e-10,
                         strict: bool = True) -> EigenResult:
    """Principal eigenvalue and positive periodic eigenfunction on (0, ell)."""
    if ell <= 0:
        raise ValueError("ell must be positive")
    nx, nt = resolution
    if nx < 32 or nt < 64:
        raise ValueError("resolution too coarse: need nx >= 32, nt >= 64")
    T = c.period
    dt = T / nt
    grid = Grid1D(nx, ell)
    x = grid.nodes

    # precompute coefficient slices over one period (slice nt wraps to 0)
    cs = [np.asarray(c(k * dt if k < nt else 0.0, x), dtype=float)
          for k in range(nt + 1)]
    c_half = np.asarray(c(0.5 * dt, x), dtype=float)

    if bc.is_dirichlet:
        phi = np.sin(np.pi * x / ell)
    else:
        phi = np.cos(np.pi * x / (2.0 * ell))
    phi /= np.max(phi)

    def evolve_period(v, implicit, store=None):
        """One period of the map, renormalized per step; returns log of the
        accumulated normalization so huge |lambda1| cannot under/overflow."""
        log_norm = 0.0
        for k in range(nt):
            if implicit:
                v = step_linear_be(v, grid, d, cs[k + 1], bc, dt)
            elif k == 0:
                # Rannacher startup: two backward-Euler half steps kill the
                # marginally stable high-frequency Crank-Nicolson mode while
                # preserving second-order accuracy of the period map
                v = step_linear_be(v, grid, d, c_half, bc, 0.5 * dt)
                v = step_linear_be(v, grid, d, cs[1], bc, 0.5 * dt)
            else:
                v = step_linear_cn(v, grid, d, cs[k], cs[k + 1], bc, k * dt, dt)
            m = float(np.max(np.abs(v)))
            if m == 0.0 or not np.isfinite(m):
                raise NonConvergenceError("period map annihilated the iterate")
            v = v / m
            log_norm += np.log(m)
            if store is not None:
                store.append((v, log_norm))
        return v, log_norm

    def power_iterate(v, implicit, raise_on_fail):
        log_rho_prev = None
        log_rho = 0.0
        its = 0
        conv = False
        for its in range(1, max_iter + 1):
            v, log_rho = evolve_period(v, implicit)
            if log_rho_prev is not None and abs(log_rho - log_rho_prev) <= ratio_tol:
                conv = True
                break
            log_rho_prev = log_rho
        if not conv and raise_on_fail:
            raise NonConvergenceError(
                f"power iteration did not converge in {max_iter} iterations",
                residual=abs(log_rho - (log_rho_prev or log_rho)))
        # normalization by max |v| loses the overall sign; the principal
        # eigenfunction is the positive representative
        if v.sum() < 0:
            v = -v
        return v, log_rho, its, conv

    phi, log_rho, iters, converged = power_iterate(phi, implicit=False,
                                                   raise_on_fail=False)
    lam = -log_rho / T

    # The Crank-Nicolson map damps its stiffest spatial mode only by a known
    # finite amount per period; an eigenvalue at or above that floor may be
    # this numerical mode, not the principal one.  In that regime (or when
    # the two modes are too close for the iteration to settle) redo the
    # iteration with the positivity-preserving backward-Euler map, which has
    # no spurious slow modes (first order, but only sign and magnitude
    # matter for eigenvalues this large).
    z = 4.0 * d * dt / grid.spacing**2
    floor = 2.0 * np.log1p(0.25 * z)
    if z > 2.0:
        floor += (nt - 1) * np.log((0.5 * z + 1.0) / (0.5 * z - 1.0))
    implicit = lam > 0.45 * floor / T or not converged
    if implicit:
        phi, log_rho, iters, converged = power_iterate(phi, implicit=True,
                                                       raise_on_fail=strict)
        lam = -log_rho / T
    elif not converged and strict:
        raise NonConvergenceError(
            f"power iteration did not converge in {max_iter} iterations")

    # one more period, storing slices of the periodic eigenfunction
    store: list = []
    w, _ = evolve_period(phi, implicit, store=store)
    slices = np.empty((nt + 1, nx + 1))
    slices[0] = phi
    for k, (v, log_norm) in enumerate(store):
        slices[k + 1] = v * np.exp(lam * (k + 1) * dt + log_norm)
    residual = float(np.max(np.abs(slices[-1] - slices[0])))
    eigfun = None
    positive = np.all(slices[:, 1:-1] > 0)
    if positive:
        slices = slices / np.max(slices)
        eigfun = PeriodicProfile(
            times=np.linspace(0.0, T, nt + 1), grid=grid, values=slices,
            period_residual=residual, tolerance=max(10 * residual, 1e-6))
    elif strict:
        raise NonConvergenceError("eigenfunction lost interior positivity")
    return EigenResult(lambda1=float(lam), eigenfunction=eigfun, ell=ell,
                       iterations=iters, residual=residual, converged=converged)


def _lambda_estimate(ell, d, c, bc, resolution):
    """Eigenvalue at sign-detection accuracy; tolerant of slow gaps."""
    res = principal_eigenvalue(ell, d, c, bc, resolution=resolution,
                               max_iter=300, ratio_tol=1e-9, strict=False)
    return res.lambda1


def critical_length(d: float, c: PeriodicField, bc: BoundaryOp,
                    bracket: Optional[tuple[float, float]] = None,
                    lam_tol: float = 1e-4,
                    resolution: tuple[int, int] = (128, 128)) -> float:
    """Length ell0 with lambda1(ell0; d, c) = 0, by bisection in ell.

    Bisection is justified by strict monotonicity of lambda1 in ell.  When
    no bracket is supplied the upper end grows geometrically from 1e-2 until
    the eigenvalue changes sign; hitting the cap raises a no-threshold error
    instead of diverging silently.
    """
    if c.tail is None:
        warnings.warn("tail metadata absent: the positivity window condition "
                      "cannot be verified; a zero crossing may not exist",
                      ConditionAWarning, stacklevel=2)
    if bracket is not None:
        lo, hi = bracket
        lam_lo = _lambda_estimate(lo, d, c, bc, resolution)
        lam_hi = _lambda_estimate(hi, d, c, bc, resolution)
        if not (lam_lo > 0 > lam_hi):
            raise BracketError(
                f"bracket does not straddle zero: lambda({lo}) = {lam_lo:.4g}, "
                f"lambda({hi}) = {lam_hi:.4g}")
    else:
        lo = 1e-2
        lam_lo = _lambda_estimate(lo, d, c, bc, resolution)
        if lam_lo <= 0:
            raise BracketError(f"lambda1 already nonpositive at ell = {lo}")
        hi = lo
        cap = lo * 2**14
        lam_hi = lam_lo
        while lam_hi > 0:
            hi *= 2.0
            if hi > cap:
                raise NoThresholdError(
                    f"lambda1 stayed positive up to ell = {cap:.4g}")
            lam_hi = _lambda_estimate(hi, d, c, bc, resolution)

    while True:
        mid = 0.5 * (lo + hi)
        lam = _lambda_estimate(mid, d, c, bc, resolution)
        if abs(lam) < lam_tol:
            return mid
        if lam > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            return mid


@dataclass(frozen=True)
class ThresholdResult:
    s_star: float
    branch: str                 # "u-branch" | "v-branch"
    u_length: Optional[float]   # None when that branch has no crossing
    v_length: Optional[float]


def threshold_s_star(a: PeriodicField, b: PeriodicField,
                     params: CompetitionParams,
                     problem: str = "coupled",
                     resolution: tuple[int, int] = (128, 128)) -> ThresholdResult:
    """Minimum critical length over the two linearized operators.

    For the coupled problem the threshold is the minimum of the critical
    lengths of (d1, a) and (d2, b); ties report the u-branch.  For the
    single-front problem only the u-operator matters.
    """
    def try_length(d, f, bc):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConditionAWarning)
                return critical_length(d, f, bc, resolution=resolution)
        except NoThresholdError:
            return None

    lu = try_length(params.d1, a, params.bc1)
    if problem == "single":
        if lu is None:
            raise NoThresholdError("u-operator eigenvalue never crosses zero")
        return ThresholdResult(lu, "u-branch", lu, None)
    lv = try_length(params.d2, b, params.bc2)
    if lu is None and lv is None:
        raise NoThresholdError("neither eigenvalue crosses zero")
    if lv is None or (lu is not None and lu <= lv):
        return ThresholdResult(lu, "u-branch", lu, lv)
    return ThresholdResult(lv, "v-branch", lu, lv)
