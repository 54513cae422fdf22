"""Periodic semi-wave machinery and spreading-speed estimates.

The semi-wave profile w solves w_t - d w_xx + F(t) w_x = phi(t) w - w^2 on
the half line with w(t, 0) = 0 and far field pinned to the periodic logistic
state z(t); it exists exactly when the mean drift stays below 2*sqrt(d*mean
phi).  The drift F0 with boundary-flux consistency mu*w_x(t,0) = F0(t) is
found by damped fixed-point iteration, and its mean bounds the asymptotic
front speed from above and below via the far-field ODE brackets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (NonConvergenceError, ParameterError, PreconditionError,
                     TruncationError)
from .fields import BoundaryOp, CompetitionParams, PeriodicField
from .freeboundary import FrontTrajectory
from .parabolic import Grid1D, Profile, step_imex
from .periodic import PeriodicScalarOde, ode_bound_set, periodic_logistic_ode
from .profiles import PeriodicProfile

#: fixed point is accepted when sup_t |Delta F| drops below this
F_TOL = 1e-6
#: required flux self-consistency of the returned drift
RESIDUAL_TOL = 1e-5
#: far-field agreement required at x = 3X/4
FAR_FIELD_TOL = 1e-2


@dataclass(frozen=True)
class SemiWave:
    """Periodic semi-wave with its drift, far-field state and diagnostics."""

    times: np.ndarray            # nt+1 samples covering [0, T]
    F_values: np.ndarray         # drift at those samples
    profile: PeriodicProfile     # w on [0, T] x [0, X]
    phi_values: np.ndarray
    z: PeriodicScalarOde
    d: float
    mean_F: float
    mean_phi: float
    flux_residual: float         # sup_t |mu w_x(t,0) - F(t)|, nan if no mu
    mu: Optional[float] = None

    @property
    def period(self) -> float:
        return float(self.times[-1])

    def F(self, t) -> np.ndarray:
        return np.interp(np.mod(t, self.period), self.times, self.F_values)

    @property
    def admissible_cap(self) -> float:
        return 2.0 * math.sqrt(self.d * self.mean_phi)


def _boundary_flux(values: np.ndarray, dx: float) -> np.ndarray:
    """w_x(t, 0) per time slice, second-order one-sided."""
    return (-3.0 * values[:, 0] + 4.0 * values[:, 1] - values[:, 2]) / (2.0 * dx)


def _march_semiwave(F_vals: np.ndarray, d: float, phi_vals: np.ndarray,
                    z: PeriodicScalarOde, grid: Grid1D, T: float, nt: int,
                    w0: np.ndarray, tol: float = 1e-9,
                    max_periods: int = 5000) -> np.ndarray:
    """March to the periodic attractor; returns (nt+1, nx+1) slices."""
    dt = T / nt
    x = grid.nodes
    w = Profile(grid, w0)
    for period in range(max_periods):
        start = w.values.copy()
        for kk in range(nt):
            Fk = float(F_vals[kk])
            pk = float(phi_vals[kk])
            w = step_imex(
                w, d, (lambda f: lambda tt, xx: -f)(Fk),
                (lambda p: lambda tt, xx, ww: ww * (p - ww))(pk),
                BoundaryOp.dirichlet(),
                ("dirichlet", float(z.value((kk + 1) * dt))),
                kk * dt, dt)
            w = Profile(grid, np.clip(w.values, 0.0, None))
        if float(np.max(np.abs(w.values - start))) < tol:
            break
    else:
        raise NonConvergenceError(
            f"semi-wave march did not reach a periodic state in "
            f"{max_periods} periods")
    slices = np.empty((nt + 1, grid.n + 1))
    slices[0] = w.values
    for kk in range(nt):
        Fk = float(F_vals[kk])
        pk = float(phi_vals[kk])
        w = step_imex(
            w, d, (lambda f: lambda tt, xx: -f)(Fk),
            (lambda p: lambda tt, xx, ww: ww * (p - ww))(pk),
            BoundaryOp.dirichlet(),
            ("dirichlet", float(z.value((kk + 1) * dt))),
            kk * dt, dt)
        w = Profile(grid, np.clip(w.values, 0.0, None))
        slices[kk + 1] = w.values
    return slices


def _sample_phi(phi: Callable[[float], float], T: float, nt: int):
    ts = np.linspace(0.0, T, nt + 1)
    vals = np.array([float(phi(t)) for t in ts])
    if np.any(vals[:-1] <= 0) and np.mean(vals[:-1]) <= 0:
        raise PreconditionError("phi must have positive mean")
    return ts, vals


def semiwave_profile(F: Callable[[float], float], d: float,
                     phi: Callable[[float], float], T: float,
                     X: Optional[float] = None,
                     resolution: tuple[int, int] = (512, 64),
                     check_far_field: bool = True) -> PeriodicProfile:
    """Periodic half-line profile for a prescribed T-periodic drift."""
    nx, nt = resolution
    ts, phi_vals = _sample_phi(phi, T, nt)
    F_vals = np.array([float(F(t)) for t in ts])
    mean_F = float(np.trapezoid(F_vals, ts) / T)
    mean_phi = float(np.trapezoid(phi_vals, ts) / T)
    if mean_phi <= 0:
        raise PreconditionError("phi must have positive mean")
    cap = 2.0 * math.sqrt(d * mean_phi)
    if mean_F >= cap:
        raise PreconditionError(
            f"no semi-wave: mean drift {mean_F:.4g} >= 2*sqrt(d*mean_phi) "
            f"= {cap:.4g}")
    if X is None:
        X = 20.0 * math.sqrt(d / mean_phi)
    z = periodic_logistic_ode(lambda t: float(phi(t)), T)
    grid = Grid1D(nx, X)
    w0 = z.value(0.0) * (1.0 - np.exp(-grid.nodes * math.sqrt(mean_phi / d)))
    slices = _march_semiwave(F_vals, d, phi_vals, z, grid, T, nt, w0)
    prof = PeriodicProfile(
        times=ts, grid=grid, values=slices,
        period_residual=float(np.max(np.abs(slices[-1] - slices[0]))),
        tolerance=1e-6)
    if check_far_field:
        far = np.array([prof.interp(t, 0.75 * X)[()] for t in ts])
        gap = float(np.max(np.abs(far - z.value(ts))))
        if gap > FAR_FIELD_TOL:
            raise TruncationError(
                f"far field off by {gap:.3g} at x = 3X/4; enlarge X")
    return prof


def solve_F0(d: float, mu: float, phi: Callable[[float], float], T: float,
             X: Optional[float] = None,
             resolution: tuple[int, int] = (512, 64),
             theta: float = 0.5, max_iter: int = 400) -> SemiWave:
    """Drift F0 with mu * w_x(t, 0) = F0(t), by damped Picard iteration.

    Starts from the constant sqrt(d * mean phi); a step that would leave the
    admissible band (mean F below 2*sqrt(d*mean phi)) is rejected and the
    damping halved.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    if not (0 < theta <= 1):
        raise ValueError("theta must lie in (0, 1]")
    nx, nt = resolution
    ts, phi_vals = _sample_phi(phi, T, nt)
    mean_phi = float(np.trapezoid(phi_vals, ts) / T)
    if mean_phi <= 0:
        raise PreconditionError("phi must have positive mean")
    cap = 2.0 * math.sqrt(d * mean_phi)
    if X is None:
        X = 20.0 * math.sqrt(d / mean_phi)
    grid = Grid1D(nx, X)
    dx = grid.spacing
    z = periodic_logistic_ode(lambda t: float(phi(t)), T)

    F_vals = np.full(nt + 1, math.sqrt(d * mean_phi))
    w_start = z.value(0.0) * (1.0 - np.exp(-grid.nodes * math.sqrt(mean_phi / d)))
    slices = None
    converged = False
    for _ in range(max_iter):
        slices = _march_semiwave(F_vals, d, phi_vals, z, grid, T, nt, w_start)
        w_start = slices[0]
        flux = mu * _boundary_flux(slices, dx)
        F_new = (1.0 - theta) * F_vals + theta * flux
        F_new = np.clip(F_new, 0.0, None)
        if float(np.trapezoid(F_new, ts) / T) >= cap:
            theta *= 0.5
            if theta < 1e-4:
                raise NonConvergenceError(
                    "damping underflow: the flux iteration keeps leaving "
                    "the admissible drift band")
            continue
        delta = float(np.max(np.abs(F_new - F_vals)))
        F_vals = F_new
        if delta < F_TOL:
            converged = True
            break
    if not converged:
        raise NonConvergenceError(
            f"F0 iteration did not converge in {max_iter} steps",
            residual=delta)

    slices = _march_semiwave(F_vals, d, phi_vals, z, grid, T, nt, w_start)
    flux = _boundary_flux(slices, dx)
    residual = float(np.max(np.abs(mu * flux - F_vals)))
    if residual > RESIDUAL_TOL:
        raise NonConvergenceError(
            f"flux self-consistency residual {residual:.3g} exceeds "
            f"{RESIDUAL_TOL:g}")
    if np.any(flux <= 0):
        raise NonConvergenceError("semi-wave boundary flux lost positivity")
    mean_F = float(np.trapezoid(F_vals, ts) / T)
    if not (0.0 < mean_F < cap):
        raise NonConvergenceError(
            f"mean drift {mean_F:.4g} left the band (0, {cap:.4g})")
    prof = PeriodicProfile(
        times=ts, grid=grid, values=slices,
        period_residual=float(np.max(np.abs(slices[-1] - slices[0]))),
        tolerance=1e-6)
    far = np.array([prof.interp(t, 0.75 * X)[()] for t in ts])
    gap = float(np.max(np.abs(far - z.value(ts))))
    if gap > FAR_FIELD_TOL:
        raise TruncationError(f"far field off by {gap:.3g}; enlarge X")
    return SemiWave(times=ts, F_values=F_vals, profile=prof,
                    phi_values=phi_vals, z=z, d=d, mean_F=mean_F,
                    mean_phi=mean_phi, flux_residual=residual, mu=mu)


@dataclass(frozen=True)
class SpeedBounds:
    lower: float
    upper: float
    z1: PeriodicScalarOde       # far-field floor of the native species
    z2: PeriodicScalarOde       # far-field ceiling of the native species
    semiwave_lower: SemiWave
    semiwave_upper: SemiWave


def speed_bounds(a: PeriodicField, b: PeriodicField,
                 params: CompetitionParams,
                 resolution: tuple[int, int] = (512, 64)) -> SpeedBounds:
    """Asymptotic front-speed bracket for the single-front problem.

    The upper bound uses the most favourable effective growth (upper tail
    envelope of a minus k times the smallest periodic far-field state of v);
    the lower bound uses the least favourable combination.
    """
    bounds = ode_bound_set(a, b, params.k, params.h)
    T = a.period
    tail = a.tail

    def effective(env, zode):
        return lambda t: float(env(t)) - params.k * float(zode.value(t))

    phi_up = effective(tail.upper, bounds.z1)
    phi_lo = effective(tail.lower, bounds.z2)
    ts = np.linspace(0.0, T, 257)
    for nm, f in (("upper", phi_up), ("lower", phi_lo)):
        vals = np.array([f(t) for t in ts])
        if np.min(vals) <= 0:
            raise ParameterError(
                f"effective growth for the {nm} bound is nonpositive "
                f"(min {np.min(vals):.4g}); weak competition fails")

    sw_up = solve_F0(params.d1, params.mu, phi_up, T, resolution=resolution)
    sw_lo = solve_F0(params.d1, params.mu, phi_lo, T, resolution=resolution)
    lower, upper = sw_lo.mean_F, sw_up.mean_F
    if lower > upper + 1e-12:
        raise NonConvergenceError(
            f"speed bounds crossed: lower {lower:.6g} > upper {upper:.6g}")
    return SpeedBounds(lower=min(lower, upper), upper=upper, z1=bounds.z1,
                       z2=bounds.z2, semiwave_lower=sw_lo, semiwave_upper=sw_up)


@dataclass(frozen=True)
class MeasuredSpeed:
    speed: float
    band: tuple[float, float]   # slopes over the two half-windows
    window: tuple[float, float]


def measured_speed(traj: FrontTrajectory,
                   window_fraction: float = 1.0 / 3.0) -> MeasuredSpeed:
    """Least-squares slope of s(t) over the trailing window.

    Gated on the trajectory actually advancing: a stalled front or an
    extinct invader has no asymptotic speed.
    """
    if not (0 < window_fraction < 1):
        raise ValueError("window fraction must lie in (0, 1)")
    t_end = float(traj.times[-1])
    T = traj.period
    tail = traj.times >= t_end - T
    if traj.sup_u[-1] < 1e-3 or float(np.max(traj.sprime[tail])) < 1e-4:
        raise PreconditionError(
            "trajectory is not spreading; refusing to fit a front speed")
    t0 = t_end * (1.0 - window_fraction)
    sel = traj.times >= t0
    if int(np.sum(sel)) < 8:
        raise PreconditionError("trailing window holds too few samples")
    tt, ssel = traj.times[sel], traj.s[sel]
    slope = float(np.polyfit(tt, ssel, 1)[0])
    half = ssel.size // 2
    s1 = float(np.polyfit(tt[:half], ssel[:half], 1)[0])
    s2 = float(np.polyfit(tt[half:], ssel[half:], 1)[0])
    return MeasuredSpeed(speed=slope, band=(min(s1, s2), max(s1, s2)),
                         window=(float(tt[0]), t_end))
