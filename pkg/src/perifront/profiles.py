"""Space-time grid functions representing T-periodic states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .parabolic import Grid1D


@dataclass(frozen=True)
class PeriodicProfile:
    """A T-periodic grid function on [0, T] x [0, L].

    ``values[i, j]`` is the state at time ``times[i]`` and node j; the first
    and last time slices agree up to ``period_residual``.
    """

    times: np.ndarray          # nt+1 slices covering [0, T]
    grid: Grid1D
    values: np.ndarray         # (nt+1, nx+1)
    period_residual: float
    tolerance: float = 1e-6

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (t.size, self.grid.n + 1):
            raise ValueError("profile shape must be (nt+1, nx+1)")
        if self.period_residual > self.tolerance:
            raise ValueError(
                f"period residual {self.period_residual:.3e} exceeds "
                f"tolerance {self.tolerance:.3e}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def period(self) -> float:
        return float(self.times[-1])

    def slice_at(self, t: float) -> np.ndarray:
        """Linear interpolation in time, t taken modulo the period."""
        T = self.period
        tr = t % T
        i = int(np.searchsorted(self.times, tr, side="right")) - 1
        i = min(max(i, 0), self.times.size - 2)
        dt = self.times[i + 1] - self.times[i]
        w = 0.0 if dt == 0 else (tr - self.times[i]) / dt
        return (1.0 - w) * self.values[i] + w * self.values[i + 1]

    def interp(self, t: float, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.grid.nodes,
                         self.slice_at(t))

    def sup_distance(self, other: "PeriodicProfile") -> float:
        return float(np.max(np.abs(self.values - other.values)))
