"""Fixed-domain 1D parabolic kernel: grids, tridiagonal solves, IMEX stepping.

Every other solver module reduces its PDE work to this one: an implicit
backward-Euler treatment of diffusion, explicit second-order centered
differences for drift, explicit reaction, and a Robin row at x = 0 folded
into the tridiagonal system with a second-order one-sided stencil.  A
Crank-Nicolson step for the linear eigen-evolution is provided as an
internal option.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.linalg import solve_banded, LinAlgError

from .errors import CFLViolationError, SingularSystemError
from .fields import BoundaryOp


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with n cells (n+1 nodes) on [0, length]."""

    n: int
    length: float

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid needs at least 8 cells")
        if self.length <= 0:
            raise ValueError("grid length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n + 1)


@dataclass(frozen=True)
class Profile:
    """Grid function: one value per node."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise ValueError("profile length must match its grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite")
        object.__setattr__(self, "values", v)


#: right boundary condition: ("dirichlet", value) or ("neumann", flux)
RightBC = tuple[str, float]


def solve_tridiagonal(lower: np.ndarray, diag: np.ndarray,
                      upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the tridiagonal system with sub/super-diagonals lower/upper."""
    diag = np.asarray(diag, dtype=float)
    n = diag.size
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if lower.size != n - 1 or upper.size != n - 1 or rhs.size != n:
        raise ValueError("band lengths must be (n-1, n, n-1) with rhs of length n")
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    try:
        x = solve_banded((1, 1), ab, rhs)
    except LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("tridiagonal solve produced non-finite values")
    return x


def _fold_left_robin(bc: BoundaryOp, dx: float,
                     lo: np.ndarray, di: np.ndarray, up: np.ndarray,
                     rhs: np.ndarray) -> None:
    """Write the Robin row alpha*w0 - beta*(-3w0+4w1-w2)/(2dx) = 0 into row 0.

    The w2 entry is eliminated with row 1 so the matrix stays tridiagonal.
    Arrays are modified in place; row 1 must already be assembled.
    """
    if bc.beta == 0.0:
        di[0] = 1.0
        up[0] = 0.0
        rhs[0] = 0.0
        return
    if up[1] == 0.0:
        # degenerate row 1 (no diffusion coupling): first-order fallback
        di[0] = bc.alpha + bc.beta / dx
        up[0] = -bc.beta / dx
        rhs[0] = 0.0
        return
    a0 = bc.alpha + 3.0 * bc.beta / (2.0 * dx)
    b0 = -2.0 * bc.beta / dx
    c0 = bc.beta / (2.0 * dx)
    # row 1: lo[0]*w0 + di[1]*w1 + up[1]*w2 = rhs[1]
    fac = c0 / up[1]
    di[0] = a0 - fac * lo[0]
    up[0] = b0 - fac * di[1]
    rhs[0] = -fac * rhs[1]


def _fold_right_neumann(flux: float, dx: float,
                        lo: np.ndarray, di: np.ndarray, up: np.ndarray,
                        rhs: np.ndarray) -> None:
    """Write (3wn - 4w(n-1) + w(n-2))/(2dx) = flux into the last row."""
    n = di.size - 1
    if lo[n - 2] == 0.0:
        di[n] = 1.0 / dx
        lo[n - 1] = -1.0 / dx
        rhs[n] = flux
        return
    an = 3.0 / (2.0 * dx)
    bn = -2.0 / dx
    cn = 1.0 / (2.0 * dx)
    # row n-1: lo[n-2]*w(n-2) + di[n-1]*w(n-1) + up[n-1]*wn = rhs[n-1]
    fac = cn / lo[n - 2]
    di[n] = an - fac * up[n - 1]
    lo[n - 1] = bn - fac * di[n - 1]
    rhs[n] = flux - fac * rhs[n - 1]


def step_imex(w: Profile, d: float,
              drift: Union[Callable[[float, np.ndarray], np.ndarray], None],
              reaction: Union[Callable[[float, np.ndarray, np.ndarray], np.ndarray], None],
              bc_left: BoundaryOp, bc_right: RightBC,
              t: float, dt: float) -> Profile:
    """One IMEX step of w_t = d w_xx + drift*w_x + reaction(t, x, w).

    Diffusion is backward Euler (implicit), drift uses explicit centered
    differences guarded by the CFL condition dt <= dx/max|drift|, and the
    reaction is explicit.  Input profiles are never mutated.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = w.grid
    dx = grid.spacing
    x = grid.nodes
    wv = w.values
    n = grid.n

    expl = wv.copy()
    if drift is not None:
        dr = np.asarray(drift(t, x), dtype=float)
        dmax = float(np.max(np.abs(dr)))
        if dmax > 0 and dt > dx / dmax * (1 + 1e-12):
            raise CFLViolationError(dt, dx / dmax)
        dwdx = np.zeros_like(wv)
        dwdx[1:-1] = (wv[2:] - wv[:-2]) / (2.0 * dx)
        expl = expl + dt * dr * dwdx
    if reaction is not None:
        expl = expl + dt * np.asarray(reaction(t, x, wv), dtype=float)

    r = d * dt / dx**2
    lo = np.full(n, -r)
    di = np.full(n + 1, 1.0 + 2.0 * r)
    up = np.full(n, -r)
    rhs = expl.copy()

    _fold_left_robin(bc_left, dx, lo, di, up, rhs)
    kind, value = bc_right
    if kind == "dirichlet":
        di[n] = 1.0
        lo[n - 1] = 0.0
        rhs[n] = value
    elif kind == "neumann":
        _fold_right_neumann(value, dx, lo, di, up, rhs)
    else:
        raise ValueError(f"unknown right boundary kind {kind!r}")

    return Profile(grid, solve_tridiagonal(lo, di, up, rhs))


def step_linear_cn(w: np.ndarray, grid: Grid1D, d: float,
                   c_now: np.ndarray, c_next: np.ndarray,
                   bc_left: BoundaryOp, t_unused: float, dt: float) -> np.ndarray:
    """Crank-Nicolson step of the linear evolution w_t = d w_xx + c(t,x) w.

    Boundary conditions: B[w] = 0 at x = 0 (folded Robin row) and w = 0 at
    the right end.  Used by the eigenvalue engine, which needs second-order
    time accuracy for its period map.
    """
    dx = grid.spacing
    n = grid.n
    r = d * dt / (2.0 * dx**2)

    # explicit half: (I + dt/2 L(t)) w, interior rows only
    rhs = w.copy()
    rhs[1:-1] = (w[1:-1] + r * (w[2:] - 2.0 * w[1:-1] + w[:-2])
                 + 0.5 * dt * c_now[1:-1] * w[1:-1])

    lo = np.full(n, -r)
    di = 1.0 + 2.0 * r - 0.5 * dt * c_next
    up = np.full(n, -r)
    _fold_left_robin(bc_left, dx, lo, di, up, rhs)
    di[n] = 1.0
    lo[n - 1] = 0.0
    rhs[n] = 0.0
    return solve_tridiagonal(lo, di, up, rhs)


def step_linear_be(w: np.ndarray, grid: Grid1D, d: float,
                   c_next: np.ndarray, bc_left: BoundaryOp,
                   dt: float) -> np.ndarray:
    """Backward-Euler step of w_t = d w_xx + c w, strongly damping at the
    stiff end of the spectrum.  Used to open each period of the eigenvalue
    evolution (Rannacher startup) so the Crank-Nicolson map's marginally
    stable high-frequency mode cannot masquerade as the principal one.
    """
    dx = grid.spacing
    n = grid.n
    r = d * dt / dx**2
    lo = np.full(n, -r)
    di = 1.0 + 2.0 * r - dt * c_next
    up = np.full(n, -r)
    rhs = w.copy()
    _fold_left_robin(bc_left, dx, lo, di, up, rhs)
    di[n] = 1.0
    lo[n - 1] = 0.0
    rhs[n] = 0.0
    return solve_tridiagonal(lo, di, up, rhs)


def boundary_derivative(w: Profile, side: str) -> float:
    """Second-order one-sided derivative at the requested end."""
    v = w.values
    dx = w.grid.spacing
    if w.grid.n < 3:
        raise ValueError("boundary derivative needs at least 3 cells")
    if side == "right":
        return float((3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dx))
    if side == "left":
        return float((-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx))
    raise ValueError(f"unknown side {side!r}")
