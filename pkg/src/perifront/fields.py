"""Time-periodic coefficient fields, boundary operators and parameter sets.

Coefficient fields are T-periodic in time and defined for x >= 0.  They ship
as a closed set of named presets (constant, time-modulated, power-law decay,
tabulated grid) so tests can target each structural assumption the solvers
rely on: positivity of the spatial tail, weak competition, and the Robin
boundary pairing at x = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, PreconditionError

#: number of equispaced samples used whenever an envelope extremum over one
#: period is needed; this sampled extremum is the definition used everywhere.
ENVELOPE_SAMPLES = 1024


@dataclass(frozen=True)
class BoundaryOp:
    """Robin pair (alpha, beta) encoding B[w] = alpha*w - beta*w_x at x = 0."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("boundary weights must be nonnegative")
        if abs(self.alpha + self.beta - 1.0) > 1e-12:
            raise ConfigError("boundary weights must satisfy alpha + beta = 1")

    @classmethod
    def dirichlet(cls) -> "BoundaryOp":
        return cls(1.0, 0.0)

    @classmethod
    def neumann(cls) -> "BoundaryOp":
        return cls(0.0, 1.0)

    @property
    def is_dirichlet(self) -> bool:
        return self.beta == 0.0

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class ConditionA:
    """Witness data for the spatial-positivity window condition.

    The field is bounded below by varsigma * x**r on windows [x_n, m*x_n]
    with x_n = x0 * m**n unbounded.
    """

    varsigma: float
    m: float
    x0: float = 1.0

    def __post_init__(self):
        if self.varsigma <= 0:
            raise ConfigError("varsigma must be positive")
        if self.m <= 1:
            raise ConfigError("window ratio m must exceed 1")

    def window(self, n: int) -> tuple[float, float]:
        xn = self.x0 * self.m**n
        return xn, self.m * xn


@dataclass(frozen=True)
class TailSpec:
    """Power-law tail metadata: envelopes for lim c(t,x)/x**r as x -> oo."""

    r: float
    lower: Callable[[float], float]
    upper: Callable[[float], float]
    condition_a: ConditionA
    x_tail: float = 10.0

    def __post_init__(self):
        if not (-2.0 < self.r <= 0.0):
            raise ConfigError("tail exponent r must lie in (-2, 0]")

    def envelope_extrema(self, period: float) -> tuple[float, float, float, float]:
        """(min lower, max lower, min upper, max upper) sampled on one period."""
        ts = np.linspace(0.0, period, ENVELOPE_SAMPLES, endpoint=False)
        lo = np.array([self.lower(t) for t in ts])
        hi = np.array([self.upper(t) for t in ts])
        if np.any(lo <= 0) or np.any(hi <= 0):
            raise ConfigError("tail envelopes must be positive")
        if np.any(lo > hi + 1e-12):
            raise ConfigError("lower tail envelope exceeds upper envelope")
        return lo.min(), lo.max(), hi.min(), hi.max()


@dataclass(frozen=True)
class PeriodicField:
    """A T-periodic coefficient c(t, x) with optional tail metadata.

    ``evaluator(t, x)`` must accept scalar t and scalar-or-array x and is
    only queried with t already reduced modulo the period.
    """

    period: float
    evaluator: Callable[[float, np.ndarray], np.ndarray]
    tail: Optional[TailSpec] = None
    nu: float = 0.5  # Hoelder exponent, informational
    name: str = "custom"
    spec: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.period <= 0:
            raise ConfigError("period must be positive")

    def __call__(self, t: float, x):
        return evaluate_field(self, t, x)

    def sup_bound(self, x_max: float, nt: int = 64, nx: int = 256) -> float:
        """Sampled sup |c| over [0,T] x [0, x_max]."""
        ts = np.linspace(0.0, self.period, nt, endpoint=False)
        xs = np.linspace(0.0, x_max, nx + 1)
        return max(float(np.max(np.abs(self.evaluator(t, xs)))) for t in ts)

    def to_dict(self) -> dict:
        return dict(self.spec) if self.spec else {"type": self.name}


def evaluate_field(f: PeriodicField, t: float, x):
    """Evaluate f at (t, x), reducing t modulo the period first."""
    if t < 0:
        raise PreconditionError("field evaluation requires t >= 0")
    tr = math.fmod(t, f.period)
    return f.evaluator(tr, np.asarray(x, dtype=float))


# ----------------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------------

def constant_field(value: float, period: float = 1.0) -> PeriodicField:
    """Spatially and temporally constant growth rate."""
    def ev(t, x):
        return np.full_like(np.asarray(x, dtype=float), value)

    tail = None
    if value > 0:
        tail = TailSpec(
            r=0.0,
            lower=lambda t, v=value: v,
            upper=lambda t, v=value: v,
            condition_a=ConditionA(varsigma=value / 2, m=2.0),
            x_tail=0.0,
        )
    return PeriodicField(period, ev, tail=tail, name="constant",
                         spec={"type": "constant", "value": value, "period": period})


def time_modulated_field(base: float, amplitude: float, period: float = 1.0) -> PeriodicField:
    """Separable preset base * (1 + amplitude * sin(2*pi*t/T)), x-independent."""
    def ev(t, x):
        v = base * (1.0 + amplitude * math.sin(2.0 * math.pi * t / period))
        return np.full_like(np.asarray(x, dtype=float), v)

    def env(t):
        return base * (1.0 + amplitude * math.sin(2.0 * math.pi * t / period))

    tail = None
    if base > 0 and abs(amplitude) < 1.0:
        floor = base * (1.0 - abs(amplitude))
        tail = TailSpec(
            r=0.0, lower=env, upper=env,
            condition_a=ConditionA(varsigma=floor / 2, m=2.0),
            x_tail=0.0,
        )
    return PeriodicField(
        period, ev, tail=tail, name="time-sin",
        spec={"type": "time-sin", "base": base, "amplitude": amplitude, "period": period},
    )


def decay_field(kappa: float, coef: float, power: float = 1.0,
                amplitude: float = 0.0, period: float = 1.0) -> PeriodicField:
    """Sign-changing preset (-kappa + coef/(1+x)**power) * (1 + amplitude*sin(2*pi*t/T)).

    With kappa < 0 the spatial limit -kappa is positive and the field carries
    an r = 0 tail; with kappa >= 0 the tail is absent (the limit is not
    positive) and no positivity window is declared.
    """
    def ev(t, x):
        mod = 1.0 + amplitude * math.sin(2.0 * math.pi * t / period)
        x = np.asarray(x, dtype=float)
        return (-kappa + coef / (1.0 + x) ** power) * mod

    tail = None
    limit = -kappa
    if limit > 0 and abs(amplitude) < 1.0:
        def env(t):
            return limit * (1.0 + amplitude * math.sin(2.0 * math.pi * t / period))

        # beyond x_tail the decaying term perturbs the limit by < limit/2
        x_tail = max(0.0, (abs(coef) / (0.5 * limit)) ** (1.0 / power) - 1.0)
        tail = TailSpec(
            r=0.0, lower=env, upper=env,
            condition_a=ConditionA(varsigma=limit * (1 - abs(amplitude)) / 2, m=2.0,
                                   x0=max(1.0, x_tail)),
            x_tail=x_tail,
        )
    return PeriodicField(
        period, ev, tail=tail, name="decay",
        spec={"type": "decay", "kappa": kappa, "coef": coef, "power": power,
              "amplitude": amplitude, "period": period},
    )


def tabulated_field(t_grid: np.ndarray, x_grid: np.ndarray,
                    values: np.ndarray, period: float) -> PeriodicField:
    """Bilinear interpolation of a rectangular (t, x) table.

    Evaluation beyond the last x column is clamped to that column, which is
    why tabulated fields never carry tail metadata.  The table must cover one
    full period in t; periodicity is enforced by wrapping.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    x_grid = np.asarray(x_grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape != (t_grid.size, x_grid.size):
        raise ConfigError("table shape must be (len(t_grid), len(x_grid))")
    if t_grid[0] != 0.0 or t_grid[-1] > period:
        raise ConfigError("table t_grid must start at 0 and stay within one period")
    # wrap in time so interpolation near t = T sees the t = 0 row
    tg = np.append(t_grid, period)
    vals = np.vstack([values, values[:1]])

    def ev(t, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, x_grid[0], x_grid[-1])
        it = np.searchsorted(tg, t, side="right") - 1
        it = min(max(it, 0), tg.size - 2)
        wt = 0.0 if tg[it + 1] == tg[it] else (t - tg[it]) / (tg[it + 1] - tg[it])
        row = (1 - wt) * vals[it] + wt * vals[it + 1]
        return np.interp(xc, x_grid, row)

    return PeriodicField(period, ev, tail=None, name="table",
                         spec={"type": "table", "period": period})


# ----------------------------------------------------------------------------
# parameter sets and initial data
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CompetitionParams:
    """Diffusivities, interspecific rates and front parameters of the system."""

    d1: float
    d2: float
    k: float
    h: float
    mu: float
    rho: float
    s0: float
    bc1: BoundaryOp = field(default_factory=BoundaryOp.dirichlet)
    bc2: BoundaryOp = field(default_factory=BoundaryOp.dirichlet)

    def __post_init__(self):
        for nm in ("d1", "d2", "mu", "s0"):
            if getattr(self, nm) <= 0:
                raise ConfigError(f"{nm} must be positive")
        for nm in ("k", "h", "rho"):
            if getattr(self, nm) < 0:
                raise ConfigError(f"{nm} must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "d1": self.d1, "d2": self.d2, "k": self.k, "h": self.h,
            "mu": self.mu, "rho": self.rho, "s0": self.s0,
            "bc1": self.bc1.to_dict(), "bc2": self.bc2.to_dict(),
        }


@dataclass(frozen=True)
class InitialData:
    """Initial profiles u0 on [0, s0] and v0 on [0, s0] or [0, oo)."""

    u0: Callable[[np.ndarray], np.ndarray]
    v0: Callable[[np.ndarray], np.ndarray]
    spec: dict = field(default_factory=dict)

    def validate(self, s0: float, bc1: BoundaryOp, bc2: BoundaryOp,
                 problem: str = "coupled", tol: float = 1e-8) -> None:
        xs = np.linspace(0.0, s0, 257)
        u = np.asarray(self.u0(xs), dtype=float)
        if abs(u[-1]) > tol:
            raise ConfigError("u0 must vanish at the initial front")
        if np.any(u[1:-1] <= 0):
            raise ConfigError("u0 must be positive inside (0, s0)")
        v = np.asarray(self.v0(xs), dtype=float)
        if problem == "coupled":
            if abs(v[-1]) > tol:
                raise ConfigError("v0 must vanish at the initial front")
            if np.any(v[1:-1] <= 0):
                raise ConfigError("v0 must be positive inside (0, s0)")
        else:
            far = np.asarray(self.v0(np.linspace(0.0, 10 * s0, 257)[1:]), dtype=float)
            if np.any(far <= 0):
                raise ConfigError("v0 must be positive on (0, oo)")
        for f, bc, nm in ((self.u0, bc1, "u0"), (self.v0, bc2, "v0")):
            dx = s0 / 256
            w = np.asarray(f(np.array([0.0, dx, 2 * dx])), dtype=float)
            deriv = (-3 * w[0] + 4 * w[1] - w[2]) / (2 * dx)
            if abs(bc.alpha * w[0] - bc.beta * deriv) > max(1e-4, 10 * dx**2):
                raise ConfigError(f"{nm} is incompatible with its boundary operator")


def bump_profile(height: float, s0: float) -> Callable[[np.ndarray], np.ndarray]:
    """Standard compatible shape height * x * (s0 - x) / s0**2 on [0, s0]."""
    def f(x):
        x = np.asarray(x, dtype=float)
        return np.clip(height * x * (s0 - x) / s0**2, 0.0, None)
    return f


def cosine_profile(height: float, s0: float) -> Callable[[np.ndarray], np.ndarray]:
    """Quarter-cosine shape, flat at x = 0 (Neumann compatible), zero at s0."""
    def f(x):
        x = np.asarray(x, dtype=float)
        return np.clip(height * np.cos(np.pi * x / (2.0 * s0)), 0.0, None)
    return f


# ----------------------------------------------------------------------------
# weak-competition check
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class H1Verdict:
    verdict: str  # "holds" | "fails" | "undecidable"
    witness: dict

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


def check_condition_H1(a: PeriodicField, b: PeriodicField,
                       params: CompetitionParams) -> H1Verdict:
    """Decide the weak-competition condition from tail envelope extrema.

    Holds iff min b_lower > h * max a_upper and min a_lower > k * max b_upper,
    with extrema sampled on one period.  Without tail metadata on both fields
    the condition is undecidable.
    """
    if abs(a.period - b.period) > 1e-12:
        raise PreconditionError("fields a and b must share the same period")
    if a.tail is None or b.tail is None:
        missing = [nm for nm, f in (("a", a), ("b", b)) if f.tail is None]
        return H1Verdict("undecidable", {"missing_tail": missing})
    if abs(a.tail.r - b.tail.r) > 1e-12:
        raise PreconditionError("fields a and b must share the same tail exponent")
    a_lo_min, _, _, a_up_max = a.tail.envelope_extrema(a.period)
    b_lo_min, _, _, b_up_max = b.tail.envelope_extrema(b.period)
    witness = {
        "min_a_lower": a_lo_min, "max_a_upper": a_up_max,
        "min_b_lower": b_lo_min, "max_b_upper": b_up_max,
        "h_times_max_a_upper": params.h * a_up_max,
        "k_times_max_b_upper": params.k * b_up_max,
    }
    ok = b_lo_min > params.h * a_up_max and a_lo_min > params.k * b_up_max
    return H1Verdict("holds" if ok else "fails", witness)
