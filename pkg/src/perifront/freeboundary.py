"""Front-fixing solvers for the two free-boundary competition problems.

The moving domain [0, s(t)] is mapped to [0, 1] by y = x/s(t), turning the
Stefan problem into a fixed-domain advection-diffusion system with
time-dependent coefficients; the front speed is recovered from the one-sided
boundary derivative and coupled explicitly (it lags the profiles by one
step).  Also builds the explicit slow-expansion supersolution certificate
that guarantees vanishing for small expansion capacities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from .eigen import principal_eigenvalue
from .errors import IntegrityError, ParameterError, PreconditionError, TruncationError
from .fields import CompetitionParams, InitialData, PeriodicField
from .parabolic import Grid1D, Profile, boundary_derivative, step_imex
from .profiles import PeriodicProfile

#: relative slack allowed on the a-priori bounds before a run is aborted
BOUND_TOL = 1e-6
#: most negative nodal value tolerated before clipping becomes an error
NEG_TOL = 1e-8
#: smallest substep, as a fraction of the nominal step, before giving up
SUBSTEP_FLOOR = 1.0 / 1024.0


@dataclass(frozen=True)
class Resolution:
    nx: int = 128              # cells of the normalized moving grid
    nt: int = 64               # steps per period
    snapshot_every: int = 0    # steps between profile snapshots (0 = one per period)
    nx_v: Optional[int] = None  # fixed-grid cells for the half-line species


@dataclass(frozen=True)
class Snapshot:
    t: float
    s: float
    u: np.ndarray              # on the normalized moving grid
    v: np.ndarray              # moving grid (coupled) or fixed grid (single)


@dataclass
class FrontTrajectory:
    """Time series of the free boundary plus profile snapshots."""

    problem: str               # "coupled" | "single"
    period: float
    times: np.ndarray
    s: np.ndarray
    sprime: np.ndarray
    sup_u: np.ndarray
    sup_v: np.ndarray
    snapshots: list[Snapshot]
    M: float
    params: CompetitionParams
    grid_u: Grid1D
    grid_v: Optional[Grid1D] = None
    meta: dict = field(default_factory=dict)

    @property
    def s_end(self) -> float:
        return float(self.s[-1])

    def speed_bound(self) -> float:
        rho = self.params.rho if self.problem == "coupled" else 0.0
        return self.params.mu * (1.0 + rho) * self.M


def _field_bound(f: PeriodicField, s0: float) -> float:
    x_max = max(100.0, 10.0 * s0)
    sup = f.sup_bound(x_max)
    far = abs(float(np.max(np.abs(f(0.37 * f.period, np.array([1e4, 1e6]))))))
    return max(sup, far)


def _apriori_bound(a, b, init, s0) -> float:
    xs = np.linspace(0.0, s0, 513)
    m = max(float(np.max(init.u0(xs))), float(np.max(init.v0(xs))),
            _field_bound(a, s0), _field_bound(b, s0))
    xs_far = np.linspace(0.0, 20.0 * s0, 513)
    m = max(m, float(np.max(init.v0(xs_far))))
    return m


def _clip_negative(vals: np.ndarray, what: str, step: int) -> np.ndarray:
    mn = float(np.min(vals))
    if mn < -NEG_TOL:
        raise IntegrityError(f"{what} dropped to {mn:.3e}", step=step)
    return np.clip(vals, 0.0, None)


def _check_upper(vals: np.ndarray, M: float, what: str, step: int) -> None:
    mx = float(np.max(vals))
    if mx > M * (1.0 + BOUND_TOL):
        raise IntegrityError(
            f"{what} reached {mx:.6g}, above the a-priori bound {M:.6g}",
            step=step)


def simulate_coupled(a: PeriodicField, b: PeriodicField,
                     params: CompetitionParams, init: InitialData,
                     t_end: float,
                     resolution: Resolution = Resolution(),
                     stop_when_s: Optional[float] = None) -> FrontTrajectory:
    """Both species share the moving domain; the front feels both gradients.

    ``stop_when_s`` ends the run early (after at least 10 periods) once the
    front passes that position; useful when only a verdict is needed.
    """
    init.validate(params.s0, params.bc1, params.bc2, problem="coupled")
    T = a.period
    dt = T / resolution.nt
    n_steps = int(round(t_end / dt))
    grid = Grid1D(resolution.nx, 1.0)
    y = grid.nodes
    dx = grid.spacing
    cadence = resolution.snapshot_every or resolution.nt

    s = params.s0
    u = Profile(grid, np.clip(np.asarray(init.u0(y * s), dtype=float), 0.0, None))
    v = Profile(grid, np.clip(np.asarray(init.v0(y * s), dtype=float), 0.0, None))
    M = _apriori_bound(a, b, init, params.s0)
    sp_cap = params.mu * (1.0 + params.rho) * M

    times = np.empty(n_steps + 1)
    ss = np.empty(n_steps + 1)
    sps = np.empty(n_steps + 1)
    sup_u = np.empty(n_steps + 1)
    sup_v = np.empty(n_steps + 1)
    snaps: list[Snapshot] = []

    def stefan_speed(up, vp, s_cur, step):
        du = boundary_derivative(up, "right") / s_cur
        dv = boundary_derivative(vp, "right") / s_cur
        sp = -params.mu * (du + params.rho * dv)
        if sp < -NEG_TOL:
            raise IntegrityError(f"front speed {sp:.3e} went negative", step=step)
        if sp > sp_cap * (1.0 + BOUND_TOL):
            raise IntegrityError(
                f"front speed {sp:.6g} exceeds mu(1+rho)M = {sp_cap:.6g}",
                step=step)
        return max(sp, 0.0)

    sp = stefan_speed(u, v, s, 0)
    times[0], ss[0], sps[0] = 0.0, s, sp
    sup_u[0], sup_v[0] = float(np.max(u.values)), float(np.max(v.values))
    snaps.append(Snapshot(0.0, s, u.values.copy(), v.values.copy()))

    t = 0.0
    for step in range(1, n_steps + 1):
        remaining = dt
        while remaining > 0.0:
            sp = stefan_speed(u, v, s, step)
            sub = remaining
            if sp * remaining > dx * s:  # CFL binds
                if sp * dt * SUBSTEP_FLOOR > dx * s:
                    raise IntegrityError(
                        f"advection CFL forced the substep below "
                        f"{dt * SUBSTEP_FLOOR:.3e}", step=step)
                sub = dx * s / sp
            s_new = s + sub * sp
            drift = (lambda sc, spc: lambda tt, yy: yy * spc / sc)(s_new, sp)
            va, vb = v.values, u.values
            row_a = np.asarray(a(t % T, s_new * y), dtype=float)
            row_b = np.asarray(b(t % T, s_new * y), dtype=float)
            u_new = step_imex(
                u, params.d1 / s_new**2, drift,
                lambda tt, yy, w: w * (row_a - w - params.k * va),
                params.bc1, ("dirichlet", 0.0), t, sub)
            v_new = step_imex(
                v, params.d2 / s_new**2, drift,
                lambda tt, yy, w: w * (row_b - w - params.h * vb),
                params.bc2, ("dirichlet", 0.0), t, sub)
            u = Profile(grid, _clip_negative(u_new.values, "u", step))
            v = Profile(grid, _clip_negative(v_new.values, "v", step))
            _check_upper(u.values, M, "u", step)
            _check_upper(v.values, M, "v", step)
            s = s_new
            t += sub
            remaining -= sub
        times[step], ss[step], sps[step] = step * dt, s, sp
        sup_u[step] = float(np.max(u.values))
        sup_v[step] = float(np.max(v.values))
        if step % cadence == 0:
            snaps.append(Snapshot(step * dt, s, u.values.copy(), v.values.copy()))
        if (stop_when_s is not None and s >= stop_when_s
                and step * dt >= 10.0 * T):
            n_steps = step
            break

    k = n_steps + 1
    return FrontTrajectory(
        problem="coupled", period=T, times=times[:k], s=ss[:k], sprime=sps[:k],
        sup_u=sup_u[:k], sup_v=sup_v[:k], snapshots=snaps, M=M, params=params,
        grid_u=grid, meta={"t_end": t_end, "resolution": resolution,
                           "stopped_early": k - 1 < int(round(t_end / dt))})


def simulate_single(a: PeriodicField, b: PeriodicField,
                    params: CompetitionParams, init: InitialData,
                    t_end: float, L: float,
                    resolution: Resolution = Resolution(),
                    stop_when_s: Optional[float] = None) -> FrontTrajectory:
    """Invader on the moving domain, native species on the fixed half line.

    The invader is extended by zero beyond the front when the native species
    samples it (that extension is part of the problem statement, not an
    approximation); the native species is interpolated onto the moving grid.
    """
    init.validate(params.s0, params.bc1, params.bc2, problem="single")
    T = a.period
    dt = T / resolution.nt
    n_steps = int(round(t_end / dt))
    grid = Grid1D(resolution.nx, 1.0)
    y = grid.nodes
    dx = grid.spacing
    nx_v = resolution.nx_v or max(256, int(4 * L))
    grid_v = Grid1D(nx_v, L)
    xv = grid_v.nodes
    cadence = resolution.snapshot_every or resolution.nt

    s = params.s0
    u = Profile(grid, np.clip(np.asarray(init.u0(y * s), dtype=float), 0.0, None))
    v = Profile(grid_v, np.clip(np.asarray(init.v0(xv), dtype=float), 0.0, None))
    M = _apriori_bound(a, b, init, params.s0)
    sp_cap = params.mu * M

    times = np.empty(n_steps + 1)
    ss = np.empty(n_steps + 1)
    sps = np.empty(n_steps + 1)
    sup_u = np.empty(n_steps + 1)
    sup_v = np.empty(n_steps + 1)
    snaps: list[Snapshot] = []

    def stefan_speed(up, s_cur, step):
        sp = -params.mu * boundary_derivative(up, "right") / s_cur
        if sp < -NEG_TOL:
            raise IntegrityError(f"front speed {sp:.3e} went negative", step=step)
        if sp > sp_cap * (1.0 + BOUND_TOL):
            raise IntegrityError(
                f"front speed {sp:.6g} exceeds mu M = {sp_cap:.6g}", step=step)
        return max(sp, 0.0)

    sp = stefan_speed(u, s, 0)
    times[0], ss[0], sps[0] = 0.0, s, sp
    sup_u[0], sup_v[0] = float(np.max(u.values)), float(np.max(v.values))
    snaps.append(Snapshot(0.0, s, u.values.copy(), v.values.copy()))

    t = 0.0
    for step in range(1, n_steps + 1):
        remaining = dt
        while remaining > 0.0:
            sp = stefan_speed(u, s, step)
            sub = remaining
            if sp * remaining > dx * s:  # CFL binds
                if sp * dt * SUBSTEP_FLOOR > dx * s:
                    raise IntegrityError(
                        f"advection CFL forced the substep below "
                        f"{dt * SUBSTEP_FLOOR:.3e}", step=step)
                sub = dx * s / sp
            s_new = s + sub * sp
            if s_new >= 0.9 * L:
                raise TruncationError(
                    f"front reached {s_new:.4g} >= 0.9 L; enlarge the "
                    "half-line truncation")
            drift = (lambda sc, spc: lambda tt, yy: yy * spc / sc)(s_new, sp)
            v_on_u = np.interp(s_new * y, xv, v.values)
            u_on_v = np.interp(xv, s_new * y, u.values, right=0.0)
            row_a = np.asarray(a(t % T, s_new * y), dtype=float)
            row_b = np.asarray(b(t % T, xv), dtype=float)
            u_new = step_imex(
                u, params.d1 / s_new**2, drift,
                lambda tt, yy, w: w * (row_a - w - params.k * v_on_u),
                params.bc1, ("dirichlet", 0.0), t, sub)
            v_new = step_imex(
                v, params.d2, None,
                lambda tt, xx, w: w * (row_b - w - params.h * u_on_v),
                params.bc2, ("neumann", 0.0), t, sub)
            u = Profile(grid, _clip_negative(u_new.values, "u", step))
            v = Profile(grid_v, _clip_negative(v_new.values, "v", step))
            _check_upper(u.values, M, "u", step)
            _check_upper(v.values, M, "v", step)
            s = s_new
            t += sub
            remaining -= sub
        times[step], ss[step], sps[step] = step * dt, s, sp
        sup_u[step] = float(np.max(u.values))
        sup_v[step] = float(np.max(v.values))
        if step % cadence == 0:
            snaps.append(Snapshot(step * dt, s, u.values.copy(), v.values.copy()))
        if (stop_when_s is not None and s >= stop_when_s
                and step * dt >= 10.0 * T):
            n_steps = step
            break

    k = n_steps + 1
    return FrontTrajectory(
        problem="single", period=T, times=times[:k], s=ss[:k], sprime=sps[:k],
        sup_u=sup_u[:k], sup_v=sup_v[:k], snapshots=snaps, M=M, params=params,
        grid_u=grid, grid_v=grid_v,
        meta={"t_end": t_end, "L": L, "resolution": resolution,
              "stopped_early": k - 1 < int(round(t_end / dt))})


# ----------------------------------------------------------------------------
# explicit vanishing certificate
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class VanishingCertificate:
    """Slow-expansion supersolution data certifying front confinement.

    The comparison pair is built from the principal eigenfunctions at the
    initial front, an expanding envelope g(t) = 1 + 2*delta - delta*e^{-sigma t}
    and the rescaled clock xi(t) = int_0^t g^{-2}.  For every expansion
    capacity mu <= mu0 the front stays below s0*(1 + 2*delta).
    """

    delta: float
    sigma: float
    Lambda: float
    lambda1: float
    gamma1: float
    C: float
    epsilon: float
    mu0: float
    g: Callable[[float], float]
    xi: Callable[[float], float]
    phi: PeriodicProfile
    psi: PeriodicProfile
    residuals: dict

    @property
    def confinement_radius(self) -> float:
        return 1.0 + 2.0 * self.delta  # relative to s0


def _slope_ratio_bound(prof: PeriodicProfile) -> float:
    """max of x * w_x / w over interior nodes and all stored time slices."""
    x = prof.grid.nodes
    dx = prof.grid.spacing
    vals = prof.values
    top = np.max(vals)
    best = -np.inf
    for row in vals:
        interior = row[1:-1]
        mask = interior > 1e-10 * top
        if not np.any(mask):
            continue
        deriv = (row[2:] - row[:-2]) / (2.0 * dx)
        ratio = x[1:-1][mask] * deriv[mask] / interior[mask]
        best = max(best, float(np.max(ratio)))
    return best


def build_vanishing_certificate(a: PeriodicField, b: PeriodicField,
                                params: CompetitionParams, init: InitialData,
                                delta: float, sigma: float,
                                eigen_resolution: tuple[int, int] = (128, 256),
                                ) -> VanishingCertificate:
    """Construct and verify the slow-expansion certificate at ell = s0."""
    if not (0 < delta < 1 and 0 < sigma < 1):
        raise ParameterError("delta and sigma must lie in (0, 1)")
    T = a.period
    s0 = params.s0
    eig_u = principal_eigenvalue(s0, params.d1, a, params.bc1,
                                 resolution=eigen_resolution)
    eig_v = principal_eigenvalue(s0, params.d2, b, params.bc2,
                                 resolution=eigen_resolution)
    lam1, gam1 = eig_u.lambda1, eig_v.lambda1
    if lam1 <= 0 or gam1 <= 0:
        raise PreconditionError(
            f"certificate needs positive eigenvalues at s0; got "
            f"lambda1 = {lam1:.4g}, gamma1 = {gam1:.4g}")
    phi, psi = eig_u.eigenfunction, eig_v.eigenfunction

    def g(t):
        return 1.0 + 2.0 * delta - delta * math.exp(-sigma * t)

    t_cap = max(10.0 / sigma, 5.0 * T)
    tgrid = np.linspace(0.0, t_cap, 2049)
    xi_grid = cumulative_simpson(np.array([g(t) ** -2 for t in tgrid]),
                                 x=tgrid, initial=0.0)
    g_inf_sq = (1.0 + 2.0 * delta) ** -2

    def xi(t):
        if t <= t_cap:
            return float(np.interp(t, tgrid, xi_grid))
        return float(xi_grid[-1] + (t - t_cap) * g_inf_sq)

    C = max(_slope_ratio_bound(phi), _slope_ratio_bound(psi))

    # smallest epsilon making the frozen-coefficient comparison valid,
    # estimated as the sampled sup of the actual coefficient mismatch
    eps = 0.0
    txs = np.linspace(0.0, t_cap, 513)
    for f in (a, b):
        for t in txs:
            gt = g(t)
            xs = np.linspace(0.0, s0 * gt, 65)
            lhs = np.asarray(f(xi(t) % T, xs / gt), dtype=float)
            rhs = gt**2 * np.asarray(f(t % T, xs), dtype=float)
            eps = max(eps, float(np.max(np.abs(lhs - rhs))))

    margin_u = -sigma - eps - sigma * C + lam1 / 4.0
    margin_v = -sigma - eps - sigma * C + gam1 / 4.0
    if margin_u <= 0 or margin_v <= 0:
        raise ParameterError(
            "interior supersolution margin nonpositive: "
            f"-sigma - eps - sigma*C + lambda1/4 = {margin_u:.4g}, "
            f"gamma margin = {margin_v:.4g}; shrink delta and sigma")

    # amplitude dominating the initial data
    xs = np.linspace(0.0, s0, 513)[1:-1]
    Lambda = 0.0
    for f0, prof in ((init.u0, phi), (init.v0, psi)):
        vals0 = np.asarray(f0(xs), dtype=float)
        base = prof.interp(0.0, xs / (1.0 + delta))
        mask = base > 1e-10
        Lambda = max(Lambda, float(np.max(vals0[mask] / base[mask])))
    Lambda *= 1.05

    # front inequality: the largest mu keeping s0 g'(t) >= -mu(w_x + rho z_x)
    def front_slope(prof):
        row = prof.values
        dxp = prof.grid.spacing
        return (3.0 * row[:, -1] - 4.0 * row[:, -2] + row[:, -3]) / (2.0 * dxp)

    fy_phi = front_slope(phi)   # <= 0 at x = s0
    fy_psi = front_slope(psi)
    tp = phi.times

    def slope_mag(t):
        fr = t % T
        return (abs(float(np.interp(fr, tp, fy_phi)))
                + params.rho * abs(float(np.interp(fr, tp, fy_psi))))

    mus = []
    for t in txs:
        denom = Lambda * slope_mag(xi(t)) / g(t)
        if denom > 0:
            mus.append(s0 * sigma * delta / denom)
    if not mus:
        raise ParameterError("front slopes vanished; certificate degenerate")
    mu0 = min(mus)

    # boundary operator residual at x = 0 (exact zero for Dirichlet)
    bres = []
    for t in txs[:64]:
        for bc, prof in ((params.bc1, phi), (params.bc2, psi)):
            row = prof.slice_at(xi(t))
            dxp = prof.grid.spacing
            d0 = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * dxp)
            bres.append(bc.alpha * row[0] - bc.beta * d0 / g(t))
    boundary_res = float(np.min(bres))

    front_res = min(s0 * sigma * delta - mu0 * Lambda * slope_mag(xi(t)) / g(t)
                    for t in txs)
    residuals = {
        "interior_u": margin_u,
        "interior_v": margin_v,
        "boundary": boundary_res,
        "front": front_res,
    }
    return VanishingCertificate(
        delta=delta, sigma=sigma, Lambda=Lambda, lambda1=lam1, gamma1=gam1,
        C=C, epsilon=eps, mu0=mu0, g=g, xi=xi, phi=phi, psi=psi,
        residuals=residuals)
