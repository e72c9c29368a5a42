"""Convergence diagnostics over estimation traces.

The t-ratio test checks that each statistic's discrepancy fluctuates around
zero over the trace tail; the sigma condition measures how the parameter
fluctuation scale relates to the parameter magnitude (reported, never
enforced).  Standard deviations use the sample (n-1) denominator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

DEFAULT_TAU = 0.1


@dataclass
class ConvergenceReport:
    """t-ratios per statistic plus optional per-parameter fluctuation ratios."""

    t_ratios: np.ndarray
    degenerate: np.ndarray
    passed: bool
    tau: float
    t_burn: int
    a_values: np.ndarray | None = None
    a_dispersion: float | None = None

    def as_text(self) -> str:
        lines = [
            f"tau = {self.tau!r}",
            f"t_burn = {self.t_burn}",
            f"passed = {str(self.passed).lower()}",
        ]
        for i, (ratio, deg) in enumerate(zip(self.t_ratios, self.degenerate)):
            suffix = " (degenerate)" if deg else ""
            lines.append(f"t_ratio_{i + 1} = {float(ratio)!r}{suffix}")
        if self.a_values is not None:
            for i, a in enumerate(self.a_values):
                lines.append(f"sigma_ratio_{i + 1} = {float(a)!r}")
            lines.append(f"sigma_ratio_dispersion = {float(self.a_dispersion)!r}")
        return "\n".join(lines) + "\n"


def _tail(rows: np.ndarray, t_burn: int, what: str) -> np.ndarray:
    if not 0 <= t_burn <= rows.shape[0] - 2:
        raise InvalidInputError(
            f"{what} needs at least 2 tail rows; burn-in {t_burn} of {rows.shape[0]} leaves too few"
        )
    return rows[t_burn:]


def t_ratio_test(trace, t_burn: int, tau: float = DEFAULT_TAU) -> ConvergenceReport:
    """|mean(d_i)| / sd(d_i) over the tail, passing when all ratios beat tau.

    A statistic frozen away from its target (zero spread, nonzero mean) can
    never pass and is flagged degenerate; one frozen exactly on target
    passes with ratio zero.
    """
    tail = _tail(trace.d, t_burn, "t-ratio test")
    mean = tail.mean(axis=0)
    sd = tail.std(axis=0, ddof=1)
    ratios = np.zeros(tail.shape[1])
    degenerate = np.zeros(tail.shape[1], dtype=bool)
    live = sd > 0
    ratios[live] = np.abs(mean[live]) / sd[live]
    frozen_off = ~live & (mean != 0)
    ratios[frozen_off] = np.inf
    degenerate[frozen_off] = True
    passed = bool(not degenerate.any() and np.all(ratios < tau))
    return ConvergenceReport(ratios, degenerate, passed, tau, t_burn)


def sigma_condition(trace, t_burn: int, c: float) -> tuple[np.ndarray, float]:
    """Per-parameter ratio A_i = sd(theta_i) / max(|mean(theta_i)|, c).

    Returns (A, dispersion) where dispersion is max A / min A: 1.0 for an
    all-constant trace, infinite when only some parameters are frozen.
    """
    if c <= 0:
        raise InvalidInputError("constant c must be positive")
    tail = _tail(trace.theta, t_burn, "sigma condition")
    mean = tail.mean(axis=0)
    sd = tail.std(axis=0, ddof=1)
    a = sd / np.maximum(np.abs(mean), c)
    amax, amin = float(a.max()), float(a.min())
    if amax == 0.0:
        dispersion = 1.0
    elif amin == 0.0:
        dispersion = np.inf
    else:
        dispersion = amax / amin
    return a, dispersion


def diagnose_trace(
    trace, t_burn: int, tau: float = DEFAULT_TAU, c: float | None = None
) -> ConvergenceReport:
    """Combined report: the t-ratio gate plus sigma ratios when c is given."""
    report = t_ratio_test(trace, t_burn, tau)
    if c is not None:
        report.a_values, report.a_dispersion = sigma_condition(trace, t_burn, c)
    return report
