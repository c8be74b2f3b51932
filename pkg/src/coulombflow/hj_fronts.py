"""Analytic front systems for the rearranged Hamilton-Jacobi problem.

Piecewise-linear profiles k(t, s) whose breakpoints move by Rankine-Hugoniot
shock speeds solve the rearranged equation dk/dt + (ds k)_+^m (k - s ubar) = 0
exactly: a single-vortex profile (one rising ramp between two plateaus), a
two-vortex profile (two ramps), and a four-piece supersolution whose middle
ramp follows the power map u -> u^(m/(m-1)).  All front positions obey small
ODE systems integrated here with fixed-step RK4 plus cubic Hermite dense
output, and the piecewise evaluators support finite-difference viscosity
residual checks away from the kinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "SingleVortexState",
    "TwoVortexState",
    "SupersolutionState",
    "FrontTrajectory",
    "FrontIntegrationError",
    "integrate_single_vortex",
    "integrate_two_vortex",
    "integrate_supersolution",
    "evaluate_single_k",
    "evaluate_two_k",
    "evaluate_supersolution_k",
    "k_evaluator",
    "kink_locator",
    "smooth_samples",
    "viscosity_residual",
    "comparison_check",
    "calibrate_front_constants",
    "FRONT_BOUND_CONSTANTS",
]

_GAP_FLOOR = 1e-10
_BASE_STEP = 1e-4


class FrontIntegrationError(RuntimeError):
    """Gap collapse or hypothesis violation; carries the last reached time."""

    def __init__(self, message: str, t_reached: float):
        super().__init__(message)
        self.t_reached = t_reached


@dataclass(frozen=True)
class SingleVortexState:
    """One ramp of slope ubar / (s2 - s1) between a zero and a full plateau."""

    s1: float
    s2: float
    ubar: float
    m: float

    def __post_init__(self):
        if not (0.0 <= self.s1 < self.s2 <= 1.0):
            raise ValueError(f"need 0 <= s1 < s2 <= 1, got ({self.s1}, {self.s2})")
        if not self.ubar > 0:
            raise ValueError("ubar must be positive")
        if not self.m >= 1:
            raise ValueError(f"front systems require m >= 1, got {self.m}")

    @property
    def slope(self) -> float:
        return self.ubar / (self.s2 - self.s1)


@dataclass(frozen=True)
class TwoVortexState:
    """Two ramps carrying mass fractions alpha and 1 - alpha."""

    s1: float
    s2: float
    s3: float
    s4: float
    alpha: float
    ubar: float
    m: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (
            0.0 <= self.s1 < self.s2 <= self.alpha <= self.s3 < self.s4 <= 1.0
        ):
            raise ValueError(
                "ordering 0 <= s1 < s2 <= alpha <= s3 < s4 <= 1 violated"
            )
        if not self.ubar > 0:
            raise ValueError("ubar must be positive")
        if not self.m >= 1:
            raise ValueError(f"front systems require m >= 1, got {self.m}")


@dataclass(frozen=True)
class SupersolutionState:
    """Four-piece dominating profile; s1 = C alpha ubar is pinned in time.

    Hypotheses: C ubar <= 1 and 2 (1 - alpha) sigma'(1) <= 1 with
    sigma(u) = u^(m/(m-1)).
    """

    C: float
    alpha: float
    s2: float
    s3: float
    ubar: float
    m: float

    def __post_init__(self):
        if not self.m > 1:
            raise ValueError(f"supersolution requires m > 1, got {self.m}")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.C * self.ubar > 1.0 + 1e-12:
            raise ValueError(f"hypothesis C * ubar <= 1 violated: {self.C * self.ubar}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        sp1 = self.m / (self.m - 1.0)
        if 2.0 * (1.0 - self.alpha) * sp1 > 1.0 + 1e-12:
            raise ValueError(
                f"hypothesis 2 (1 - alpha) sigma'(1) <= 1 violated: "
                f"{2.0 * (1.0 - self.alpha) * sp1}"
            )
        if not (self.s1 < self.s2 < self.s3 <= 1.0):
            raise ValueError("ordering s1 < s2 < s3 <= 1 violated")

    @property
    def s1(self) -> float:
        return self.C * self.alpha * self.ubar

    @property
    def sigma_prime_1(self) -> float:
        return self.m / (self.m - 1.0)


@dataclass
class FrontTrajectory:
    """Dense front-position series with exact endpoint derivatives."""

    kind: str
    times: np.ndarray
    positions: np.ndarray  # shape (N, npos)
    derivs: np.ndarray  # shape (N, npos), RHS at the stored points
    state0: object
    halted_at: Optional[float] = None
    t_star: float = math.inf
    t_upper: float = math.inf

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def interpolate(self, t: float) -> np.ndarray:
        """Cubic Hermite interpolation of all positions at time t."""
        times = self.times
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise ValueError(f"time {t} outside integrated range [{times[0]}, {times[-1]}]")
        t = min(max(t, times[0]), times[-1])
        i = int(np.searchsorted(times, t, side="right") - 1)
        i = min(max(i, 0), len(times) - 2)
        h = times[i + 1] - times[i]
        if h <= 0:
            return self.positions[i]
        tau = (t - times[i]) / h
        h00 = 2 * tau**3 - 3 * tau**2 + 1
        h10 = tau**3 - 2 * tau**2 + tau
        h01 = -2 * tau**3 + 3 * tau**2
        h11 = tau**3 - tau**2
        return (
            h00 * self.positions[i]
            + h10 * h * self.derivs[i]
            + h01 * self.positions[i + 1]
            + h11 * h * self.derivs[i + 1]
        )

    def state_at(self, t: float):
        pos = self.interpolate(t)
        s0 = self.state0
        if self.kind == "single":
            return replace(s0, s1=float(pos[0]), s2=float(pos[1]))
        if self.kind == "double":
            return replace(
                s0, s1=float(pos[0]), s2=float(pos[1]), s3=float(pos[2]), s4=float(pos[3])
            )
        return replace(s0, s2=float(pos[0]), s3=float(pos[1]))


def _rk4_integrate(
    rhs: Callable[[np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_end: float,
    m: float,
    ubar: float,
    gap_of: Callable[[np.ndarray], float],
    valid: Callable[[np.ndarray], bool],
    on_gap_collapse: str,
    kind: str,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, Optional[float]]:
    """Fixed-rule RK4 stepping.

    Base step 1e-4 * min(1, gap^(m-1) / ubar^m), floored by a
    relative-motion step that moves fronts by at most 0.1 percent of the
    current gap (the base rule alone stalls for large m where it scales like
    gap^(m-1)); both rules keep the local RK4 error orders of magnitude below
    every stated tolerance.
    """
    ts = [0.0]
    ys = [np.array(y0, dtype=float)]
    ds = [rhs(ys[0])]
    t, y = 0.0, np.array(y0, dtype=float)
    halted = None
    while t < t_end - 1e-15:
        gap = gap_of(y)
        if gap < _GAP_FLOOR:
            if on_gap_collapse == "raise":
                raise FrontIntegrationError(
                    f"{kind} front gap collapsed at t = {t:.6g}", t_reached=t
                )
            halted = t
            break
        k1 = rhs(y)
        speed = float(np.max(np.abs(k1)))
        dt = _BASE_STEP * min(1.0, gap ** (m - 1.0) / ubar**m)
        if speed > 0.0:
            dt = max(dt, 1e-3 * gap / speed)
        dt = min(dt, t_end - t)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y_new = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not valid(y_new):
            halted = t
            break
        t, y = t + dt, y_new
        ts.append(t)
        ys.append(y.copy())
        ds.append(rhs(y))
    return np.array(ts), np.array(ys), np.array(ds), halted


def integrate_single_vortex(init: SingleVortexState, t_end: float) -> FrontTrajectory:
    """Track the shock pair of the single-vortex profile until t_end."""
    ubar, m = init.ubar, init.m

    def rhs(y):
        s1, s2 = y
        denom = max(s2 - s1, _GAP_FLOOR) ** (m - 1.0)
        return np.array(
            [-(ubar**m) * s1 / denom, ubar**m * (1.0 - s2) / denom]
        )

    ts, ys, ds, halted = _rk4_integrate(
        rhs,
        np.array([init.s1, init.s2]),
        t_end,
        m,
        ubar,
        gap_of=lambda y: y[1] - y[0],
        valid=lambda y: 0.0 - 1e-12 <= y[0] < y[1] <= 1.0 + 1e-12,
        on_gap_collapse="raise",
        kind="single-vortex",
    )
    if halted is not None:
        raise FrontIntegrationError(
            f"single-vortex ordering lost at t = {halted:.6g}", t_reached=halted
        )
    return FrontTrajectory("single", ts, ys, ds, init)


def integrate_two_vortex(init: TwoVortexState, t_end: float) -> FrontTrajectory:
    """Track the four shocks of the two-vortex profile on its maximal interval."""
    ubar, m, alpha = init.ubar, init.m, init.alpha
    a_fac = alpha ** (m - 1.0) * ubar**m
    b_fac = (1.0 - alpha) ** (m - 1.0) * ubar**m

    def rhs(y):
        s1, s2, s3, s4 = y
        d12 = max(s2 - s1, _GAP_FLOOR) ** (m - 1.0)
        d34 = max(s4 - s3, _GAP_FLOOR) ** (m - 1.0)
        return np.array(
            [
                -a_fac * s1 / d12,
                a_fac * (alpha - s2) / d12,
                b_fac * (alpha - s3) / d34,
                b_fac * (1.0 - s4) / d34,
            ]
        )

    def valid(y):
        s1, s2, s3, s4 = y
        tol = 1e-12
        return (
            -tol <= s1 < s2 <= alpha + tol <= s3 + 2 * tol
            and alpha - tol <= s3 < s4 <= 1.0 + tol
        )

    ts, ys, ds, halted = _rk4_integrate(
        rhs,
        np.array([init.s1, init.s2, init.s3, init.s4]),
        t_end,
        m,
        ubar,
        gap_of=lambda y: min(y[1] - y[0], y[3] - y[2]),
        valid=valid,
        on_gap_collapse="halt",
        kind="two-vortex",
    )
    return FrontTrajectory("double", ts, ys, ds, init, halted_at=halted)


def _hit_time(traj: FrontTrajectory, f: Callable[[float], float]) -> float:
    """First root of f over the stored window via bisection, +inf if none."""
    ts = traj.times
    vals = np.array([f(t) for t in ts])
    sign_change = np.nonzero(vals[:-1] * vals[1:] <= 0)[0]
    if vals[0] == 0.0:
        return float(ts[0])
    if len(sign_change) == 0:
        return math.inf
    lo, hi = float(ts[sign_change[0]]), float(ts[sign_change[0] + 1])
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def integrate_supersolution(init: SupersolutionState, t_end: float) -> FrontTrajectory:
    """Integrate the dominating profile's two moving fronts.

    Returns the trajectory together with the first-hitting times t_star
    (s2 reaches the pinned s1) and t_upper (s3 covers half its headroom),
    reported as +inf when not reached before t_end.
    """
    ubar, m, alpha = init.ubar, init.m, init.alpha
    sp1 = init.sigma_prime_1
    fac = (1.0 - alpha) ** (m - 1.0) * ubar**m * sp1 ** (m - 1.0)
    s1 = init.s1

    def rhs(y):
        s2, s3 = y
        denom = max(s3 - s2, _GAP_FLOOR) ** (m - 1.0)
        return np.array(
            [
                -fac * (s3 - s2 + (1.0 - alpha) * sp1) / denom,
                fac * (1.0 - s3) / denom,
            ]
        )

    ts, ys, ds, halted = _rk4_integrate(
        rhs,
        np.array([init.s2, init.s3]),
        t_end,
        m,
        ubar,
        gap_of=lambda y: y[1] - y[0],
        valid=lambda y: y[1] <= 1.0 + 1e-12,
        on_gap_collapse="halt",
        kind="supersolution",
    )
    traj = FrontTrajectory("super", ts, ys, ds, init, halted_at=halted)
    traj.t_star = _hit_time(traj, lambda t: traj.interpolate(t)[0] - s1)
    traj.t_upper = _hit_time(
        traj, lambda t: 2.0 * traj.interpolate(t)[1] - (1.0 + init.s3)
    )
    return traj


# --- piecewise evaluators ----------------------------------------------------

def evaluate_single_k(state: SingleVortexState, s) -> np.ndarray:
    """Three-piece profile: 0, rising ramp, plateau at the mass."""
    s = np.asarray(s, dtype=float)
    ramp = state.slope * (s - state.s1)
    out = np.where(s < state.s1, 0.0, np.where(s < state.s2, ramp, state.ubar))
    return out if out.ndim else float(out)


def evaluate_two_k(state: TwoVortexState, s) -> np.ndarray:
    """Five-piece profile with plateaus at 0, alpha * ubar, and ubar."""
    s = np.asarray(s, dtype=float)
    au = state.alpha * state.ubar
    ramp1 = au * (s - state.s1) / (state.s2 - state.s1)
    ramp2 = (state.ubar - au) * (s - state.s3) / (state.s4 - state.s3) + au
    out = np.where(
        s < state.s1,
        0.0,
        np.where(
            s < state.s2,
            ramp1,
            np.where(s < state.s3, au, np.where(s < state.s4, ramp2, state.ubar)),
        ),
    )
    return out if out.ndim else float(out)


def evaluate_supersolution_k(state: SupersolutionState, s) -> np.ndarray:
    """Four-piece profile whose middle ramp follows sigma(u) = u^(m/(m-1))."""
    s = np.asarray(s, dtype=float)
    ubar, alpha = state.ubar, state.alpha
    gap = state.s3 - state.s2
    u = np.clip((s - state.s2) / gap, 0.0, 1.0)
    sigma = u ** (state.m / (state.m - 1.0))
    ramp = sigma * (1.0 - alpha) * ubar + alpha * ubar
    out = np.where(
        s <= state.s1,
        s / state.C,
        np.where(s <= state.s2, alpha * ubar, np.where(s <= state.s3, ramp, ubar)),
    )
    return out if out.ndim else float(out)


_EVALUATORS = {
    "single": evaluate_single_k,
    "double": evaluate_two_k,
    "super": evaluate_supersolution_k,
}


def k_evaluator(traj: FrontTrajectory) -> Callable[[float, np.ndarray], np.ndarray]:
    """Callable (t, s) -> k built from the integrated fronts."""
    evaluate = _EVALUATORS[traj.kind]

    def k_of(t: float, s):
        return evaluate(traj.state_at(t), s)

    return k_of


def kink_locator(traj: FrontTrajectory) -> Callable[[float], np.ndarray]:
    """Callable t -> interface positions where the profile is not smooth."""

    def kinks(t: float) -> np.ndarray:
        state = traj.state_at(t)
        if traj.kind == "single":
            return np.array([state.s1, state.s2])
        if traj.kind == "double":
            return np.array([state.s1, state.s2, state.s3, state.s4])
        return np.array([state.s1, state.s2, state.s3])

    return kinks


def smooth_samples(
    traj: FrontTrajectory,
    n_times: int = 12,
    fractions: Sequence[float] = (0.3, 0.5, 0.7),
    guard: float = 1e-3,
    t_max: Optional[float] = None,
) -> list[tuple[float, float]]:
    """Sample points (t, s) in the interior of every smooth piece.

    Points closer than `guard` to a moving interface are dropped, as are
    times too close to the window ends for a centered time difference.
    """
    t_hi = min(traj.t_end, t_max if t_max is not None else traj.t_end)
    if traj.halted_at is not None:
        t_hi = min(t_hi, traj.halted_at)
    kinks = kink_locator(traj)
    out = []
    times = np.linspace(0.05 * t_hi, 0.95 * t_hi, n_times)
    for t in times:
        pos = np.concatenate(([0.0], np.sort(kinks(t)), [1.0]))
        for a, b in zip(pos[:-1], pos[1:]):
            if b - a < 4 * guard:
                continue
            for f in fractions:
                s = a + f * (b - a)
                if s - a >= guard and b - s >= guard:
                    out.append((float(t), float(s)))
    return out


def viscosity_residual(
    k_eval: Callable[[float, float], float],
    m: float,
    ubar: float,
    kind: str,
    samples: Iterable[tuple[float, float]],
    kinks: Optional[Callable[[float], np.ndarray]] = None,
    delta: float = 1e-5,
) -> float:
    """Worst signed residual dk/dt + (ds k)_+^m (k - s ubar) at smooth samples.

    kind="sub" returns the max (compliant when <= tol); kind="super" returns
    the min (compliant when >= -tol).  Central finite differences with step
    delta; samples must keep a 2-delta margin from any kink, enforced when a
    kink locator is supplied.
    """
    if kind not in ("sub", "super"):
        raise ValueError(f"kind must be 'sub' or 'super', got {kind!r}")
    worst = -math.inf if kind == "sub" else math.inf
    checked = 0
    for t, s in samples:
        if kinks is not None:
            if np.min(np.abs(kinks(t) - s)) < 2 * delta:
                raise ValueError(f"sample ({t}, {s}) too close to a kink")
        dt = min(delta, 0.45 * t) if t > 0 else delta
        k0 = float(k_eval(t, s))
        dkdt = (float(k_eval(t + dt, s)) - float(k_eval(t - dt, s))) / (2 * dt)
        dkds = (float(k_eval(t, s + delta)) - float(k_eval(t, s - delta))) / (2 * delta)
        r = dkdt + max(dkds, 0.0) ** m * (k0 - s * ubar)
        worst = max(worst, r) if kind == "sub" else min(worst, r)
        checked += 1
    if checked == 0:
        raise ValueError("no samples supplied")
    return float(worst)


def comparison_check(
    profiles: Sequence[tuple[float, "RearrangedProfile"]],
    k_super: Callable[[float, np.ndarray], np.ndarray],
    t_max: Optional[float] = None,
) -> float:
    """Max over sampled (t, s) of simulated k minus the dominating profile."""
    worst = -math.inf
    for t, prof in profiles:
        if t_max is not None and t > t_max + 1e-12:
            continue
        s = prof.s_midpoints
        excess = prof.k_at_midpoints() - np.asarray(k_super(t, s), dtype=float)
        worst = max(worst, float(np.max(excess)))
    if worst == -math.inf:
        raise ValueError("no profiles inside the comparison window")
    return worst


# --- one-time calibration of the front-tracking constants --------------------

def calibrate_front_constants(
    m: float,
    configs: Optional[Sequence[SupersolutionState]] = None,
    t_end: float = 2.0,
    t_lo: float = 1e-5,
    n_grid: int = 200,
) -> dict[str, float]:
    """Measure the extremal constants of the supersolution front envelopes.

    The analytic statements assert the existence of m-dependent constants
    such that, for the collapsed-gap profile started from a double point s0
    and in time windows tied to the hitting times,

        s2(t) >= s0 - c_retreat * ubar * t^(1/m)
        s3(t) >= s0 + c_advance * (1-alpha)^((m-1)/m) * ubar * t^(1/m)
        s3(t) <= s0 + c_spread * ubar * t^(1/m)
        s3(t) - s2(t) >= c_gap * (1-alpha) * ubar * t^(1/m)
        t_star >= c_tstar * ((s2(0) - s1) / ubar)^m

    The sweep integrates a family of admissible configurations with a nearly
    collapsed initial gap (the regime the t^(1/m) envelopes describe; with an
    order-one initial gap the advance ratio degenerates at small times),
    samples the ratios on a log time grid, and records the extremes.  The
    output is frozen in FRONT_BOUND_CONSTANTS and reused by the verification
    suite with small safety margins.  The constants are invariant under
    rescaling of ubar (the dynamics depends on ubar only through ubar^m t),
    so the sweep varies alpha and the front positions at ubar = 1.
    """
    gap0 = 3e-4
    if configs is None:
        sp1 = m / (m - 1.0)
        alpha_lo = 1.0 - 0.5 / sp1  # tightest admissible alpha
        configs = []
        for alpha in (alpha_lo, 0.5 * (alpha_lo + 1.0), 0.95):
            if not alpha_lo - 1e-12 <= alpha < 1:
                continue
            for s0 in (0.3, 0.5, 0.7):
                state = SupersolutionState(
                    C=0.25, alpha=alpha, s2=s0, s3=s0 + gap0, ubar=1.0, m=m
                )
                configs.append(state)
    out = {
        "c_retreat": 0.0,
        "c_advance": math.inf,
        "c_spread": 0.0,
        "c_gap": math.inf,
        "c_tstar": math.inf,
    }
    for state in configs:
        traj = integrate_supersolution(state, t_end)
        t_hi = min(traj.t_end, traj.halted_at or math.inf)
        ts = np.geomspace(t_lo, t_hi, n_grid)
        pos = np.array([traj.interpolate(t) for t in ts])
        s2, s3 = pos[:, 0], pos[:, 1]
        scale = state.ubar * ts ** (1.0 / m)
        in_star = ts <= min(traj.t_star, t_hi)
        in_both = ts <= min(traj.t_star, traj.t_upper, t_hi)
        if np.any(in_star):
            out["c_retreat"] = max(
                out["c_retreat"], float(np.max((state.s2 - s2[in_star]) / scale[in_star]))
            )
        if np.any(in_both):
            afac = (1.0 - state.alpha) ** ((m - 1.0) / m)
            out["c_advance"] = min(
                out["c_advance"],
                float(np.min((s3[in_both] - state.s3) / (afac * scale[in_both]))),
            )
            out["c_gap"] = min(
                out["c_gap"],
                float(
                    np.min((s3[in_both] - s2[in_both]) / ((1.0 - state.alpha) * scale[in_both]))
                ),
            )
        out["c_spread"] = max(out["c_spread"], float(np.max((s3 - state.s3) / scale)))
        if math.isfinite(traj.t_star):
            out["c_tstar"] = min(
                out["c_tstar"],
                traj.t_star / ((state.s2 - state.s1) / state.ubar) ** m,
            )
    return out


# Frozen one-time calibration output (sweep of calibrate_front_constants over
# the default admissible family at t_end = 2); the verification suite asserts
# the envelope bounds with these values and small safety margins.
FRONT_BOUND_CONSTANTS: dict[float, dict[str, float]] = {
    2.0: {
        "c_retreat": 0.82544,
        "c_advance": 0.45769,
        "c_spread": 0.62378,
        "c_gap": 3.58713,
        "c_tstar": 1.46418,
    },
    3.0: {
        "c_retreat": 0.75146,
        "c_advance": 0.42774,
        "c_spread": 0.54935,
        "c_gap": 2.53916,
        "c_tstar": 2.32811,
    },
    4.0: {
        "c_retreat": 0.69449,
        "c_advance": 0.39114,
        "c_spread": 0.49721,
        "c_gap": 2.13568,
        "c_tstar": 4.26098,
    },
}
