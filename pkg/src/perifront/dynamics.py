"""Long-run classification of front trajectories.

The spreading verdict is threshold-based: once the front has passed the
critical length with a safety margin, spreading is guaranteed and no
extrapolation of s(t) is needed.  Vanishing is read off the decay of the
populations together with a stalled front.  Neither rule firing by the end
of the run yields the first-class verdict "undecided".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BracketError, NonConvergenceError, PreconditionError
from .freeboundary import FrontTrajectory
from .periodic import ExtremalStates

#: default spreading margin as a fraction of the threshold
MARGIN_FRAC = 0.1
#: default sup-norm level below which a species counts as extinct
EPS_V = 1e-3
#: default front-speed level below which the front counts as stalled
EPS_S = 1e-4


@dataclass(frozen=True)
class DichotomyReport:
    verdict: str               # "spreading" | "vanishing" | "undecided"
    problem: str
    threshold: float
    margin: float
    t_end: float
    s_end: float
    sup_u_end: float
    sup_v_end: float
    sprime_tail_max: float     # max s' over the last full period
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("verdict", "problem", "threshold", "margin", "t_end", "s_end",
              "sup_u_end", "sup_v_end", "sprime_tail_max")}
        d["evidence"] = {k: (list(np.asarray(v, dtype=float)) if
                             isinstance(v, np.ndarray) else v)
                         for k, v in self.evidence.items()}
        return d


def classify(traj: FrontTrajectory, threshold: float,
             problem: Optional[str] = None, margin_frac: float = MARGIN_FRAC,
             eps_v: float = EPS_V, eps_s: float = EPS_S) -> DichotomyReport:
    """Apply the spreading and vanishing decision rules to a trajectory."""
    problem = problem or traj.problem
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    T = traj.period
    t_end = float(traj.times[-1])
    if t_end < 10.0 * T:
        raise PreconditionError(
            f"classification needs at least 10 periods; run covers "
            f"{t_end / T:.2f}")

    tail = traj.times >= t_end - T
    sprime_tail = float(np.max(traj.sprime[tail]))
    s_max = float(np.max(traj.s))
    sup_u_end = float(traj.sup_u[-1])
    sup_v_end = float(traj.sup_v[-1])

    # per-period sup-norm series, thinned for the report
    nt = max(1, int(round(T / (traj.times[1] - traj.times[0]))))
    decay_u = traj.sup_u[::nt]
    decay_v = traj.sup_v[::nt]
    evidence = {
        "s_over_threshold": s_max / threshold,
        "sup_u_per_period": decay_u,
        "sup_v_per_period": decay_v,
        "sprime_tail_max": sprime_tail,
    }

    crossed = s_max >= threshold * (1.0 + margin_frac)
    dead = sup_u_end < eps_v
    if problem == "coupled":
        dead = dead and sup_v_end < eps_v
    stalled = sprime_tail < eps_s

    if crossed:
        verdict = "spreading"
    elif dead and stalled:
        verdict = "vanishing"
    else:
        verdict = "undecided"
    return DichotomyReport(
        verdict=verdict, problem=problem, threshold=threshold,
        margin=margin_frac * threshold, t_end=t_end, s_end=traj.s_end,
        sup_u_end=sup_u_end, sup_v_end=sup_v_end,
        sprime_tail_max=sprime_tail, evidence=evidence)


@dataclass(frozen=True)
class CriticalMuResult:
    kind: str                  # "sharp" | "interval"
    mu_lo: float               # largest expansion capacity seen vanishing
    mu_hi: float               # smallest expansion capacity seen spreading
    evaluations: tuple         # ((mu, verdict), ...) in evaluation order

    @property
    def midpoint(self) -> float:
        return float(np.sqrt(self.mu_lo * self.mu_hi))


def critical_mu(simulate: Callable[[float, float], FrontTrajectory],
                mu_bracket: tuple[float, float], threshold: float,
                problem: str, t_end: float,
                tolerance: float = 0.05) -> CriticalMuResult:
    """Bracket the critical expansion capacity between the two regimes.

    ``simulate(mu, t_end)`` must run the scenario at the given capacity.
    For the single-front problem the trajectory is monotone in mu, so plain
    bisection returns a sharp bracket of relative width <= tolerance.  For
    the coupled problem no monotonicity is available and the result is the
    conservative interval between the extreme observed verdicts, refined by
    probing but never collapsed to a point.
    """
    mu_lo, mu_hi = mu_bracket
    if not (0 < mu_lo < mu_hi):
        raise ValueError("mu bracket must satisfy 0 < mu_lo < mu_hi")
    evaluations: list[tuple[float, str]] = []

    def verdict_at(mu: float) -> str:
        traj = simulate(mu, t_end)
        if traj.params.s0 >= threshold:
            raise PreconditionError(
                f"s0 = {traj.params.s0} >= threshold {threshold:.4g}: "
                "spreading holds for every mu, no critical value exists")
        rep = classify(traj, threshold, problem=problem)
        if rep.verdict == "undecided":
            rep = classify(simulate(mu, 2.0 * t_end), threshold,
                           problem=problem)
            if rep.verdict == "undecided":
                raise NonConvergenceError(
                    f"verdict undecided at mu = {mu:.6g} even with the "
                    f"horizon doubled to {2.0 * t_end:.4g}")
        evaluations.append((mu, rep.verdict))
        return rep.verdict

    if verdict_at(mu_lo) != "vanishing":
        raise BracketError(
            f"expected vanishing at mu_lo = {mu_lo:.4g}, got "
            f"{evaluations[-1][1]}")
    if verdict_at(mu_hi) != "spreading":
        raise BracketError(
            f"expected spreading at mu_hi = {mu_hi:.4g}, got "
            f"{evaluations[-1][1]}")

    lo, hi = mu_lo, mu_hi
    if problem == "single":
        while hi - lo > tolerance * hi:
            mid = float(np.sqrt(lo * hi))
            if verdict_at(mid) == "spreading":
                hi = mid
            else:
                lo = mid
        return CriticalMuResult("sharp", lo, hi, tuple(evaluations))

    # coupled: refine without assuming monotonicity
    vanish_set, spread_set = {mu_lo}, {mu_hi}
    while True:
        lo, hi = max(vanish_set), min(spread_set)
        if hi <= lo or hi - lo <= tolerance * hi:
            break
        mid = float(np.sqrt(lo * hi))
        (spread_set if verdict_at(mid) == "spreading" else vanish_set).add(mid)
    return CriticalMuResult("interval", max(vanish_set), min(spread_set),
                            tuple(evaluations))


@dataclass(frozen=True)
class ConvergenceReport:
    ok: bool
    window: tuple[float, float]
    periods_used: int
    tol: float
    max_low_violation_u: float   # how far min_n u dips below the lower state
    max_high_violation_u: float  # how far max_n u rises above the upper state
    max_low_violation_v: float
    max_high_violation_v: float


def convergence_to_periodic(traj: FrontTrajectory, states: ExtremalStates,
                            window: tuple[float, float],
                            tol: float = 5e-3) -> ConvergenceReport:
    """Check the extremal-state sandwich on a window behind the front.

    Over the last 5 periods, the pointwise min and max across periods of
    each species must lie between the lower and upper extremal states up to
    ``tol`` plus a discretization allowance.
    """
    T = traj.period
    t_end = float(traj.times[-1])
    t_cut = t_end - 5.0 * T
    if t_cut < 0:
        raise PreconditionError("trajectory shorter than 5 periods")
    if traj.sup_u[-1] < EPS_V or float(np.max(
            traj.sprime[traj.times >= t_end - T])) < EPS_S:
        raise PreconditionError(
            "trajectory is not spreading; the sandwich only holds behind an "
            "advancing front")
    x_lo, x_hi = window
    if not (0 <= x_lo < x_hi):
        raise ValueError("window must satisfy 0 <= x_lo < x_hi")
    s_at_cut = float(np.interp(t_cut, traj.times, traj.s))
    if x_hi > s_at_cut:
        raise PreconditionError(
            f"window edge {x_hi:.4g} is outside the front ({s_at_cut:.4g}) "
            "during the comparison span")
    if x_hi > states.u_upper.grid.length:
        raise ValueError("window exceeds the extremal states' domain")

    snaps = [sn for sn in traj.snapshots if sn.t >= t_cut - 1e-9]
    if len(snaps) < 2:
        raise PreconditionError("need snapshots in the last 5 periods; "
                                "reduce the snapshot cadence")
    xs = np.linspace(x_lo, x_hi, 129)
    # group snapshots by phase so each stack compares like with like
    groups: dict[float, list] = {}
    for sn in snaps:
        phase = round((sn.t % T) / T, 9) % 1.0
        groups.setdefault(phase, []).append(sn)

    # interpolation error is second order in the physical spacings
    allowance = ((traj.grid_u.spacing * traj.s_end) ** 2
                 + states.u_upper.grid.spacing ** 2)
    tol_total = tol + allowance

    def physical(sn, which):
        if which == "u" or traj.problem == "coupled":
            vals = sn.u if which == "u" else sn.v
            return np.interp(xs, sn.s * traj.grid_u.nodes, vals)
        return np.interp(xs, traj.grid_v.nodes, sn.v)

    low_u = high_u = low_v = high_v = 0.0
    used = 0
    for phase, stack in groups.items():
        if len(stack) < 2:
            continue
        used = max(used, len(stack))
        t_phase = phase * T
        for which, lower, upper in (
                ("u", states.u_lower, states.u_upper),
                ("v", states.v_lower, states.v_upper)):
            rows = np.array([physical(sn, which) for sn in stack])
            mn, mx = rows.min(axis=0), rows.max(axis=0)
            dip = float(np.max(lower.interp(t_phase, xs) - mn))
            rise = float(np.max(mx - upper.interp(t_phase, xs)))
            if which == "u":
                low_u, high_u = max(low_u, dip), max(high_u, rise)
            else:
                low_v, high_v = max(low_v, dip), max(high_v, rise)
    if used < 2:
        raise PreconditionError("no phase had two comparable snapshots")
    ok = max(low_u, high_u, low_v, high_v) <= tol_total
    return ConvergenceReport(
        ok=ok, window=(x_lo, x_hi), periods_used=used, tol=tol_total,
        max_low_violation_u=low_u, max_high_violation_u=high_u,
        max_low_violation_v=low_v, max_high_violation_v=high_v)
