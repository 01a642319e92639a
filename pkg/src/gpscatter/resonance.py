"""Transmission sweeps, unit-transmission resonance location, and the
split-potential transmission-equality check.

A resonance is located in two stages.  A coarse scan plus golden-section
maximization finds the T2 peak; because unit transmission is a tangency,
the maximizer alone carries an O(sqrt(tol)) error, so it is polished by
root-finding on the projected reflection residual

    s(mu) = Re[ zeta_bar(mu) * conj(d zeta_bar / d mu) ],

where zeta_bar = i k' psi - psi' at the upstream point vanishes exactly at
transparency.  s crosses zero linearly there (s ~ |v|^2 (mu - mu_res) near
the root), which root-finders handle far better than the quadratic T2 peak.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .errors import GPScatterError, NoResonanceInBracket
from .integrator import IntegratorConfig
from .model import PhysicalParams, Potential, split
from .scatter import Direction, ScatterProblem, solve_scattering

__all__ = [
    "TransmissionCurve",
    "SplitReport",
    "sweep",
    "find_resonance",
    "split_check",
    "split_sweep",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TransmissionCurve:
    """Ordered (mu, T2, status) triples; T2 is None unless status == "ok"."""

    points: tuple[tuple[float, float | None, str], ...]

    def __post_init__(self) -> None:
        mus = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(mus, mus[1:])):
            raise ValueError("mu values must be strictly increasing")
        for mu, t2, status in self.points:
            if (t2 is not None) != (status == "ok"):
                raise ValueError(f"T2/status mismatch at mu={mu}")

    @property
    def mu(self) -> tuple[float, ...]:
        return tuple(p[0] for p in self.points)

    @property
    def T2(self) -> tuple[float | None, ...]:
        return tuple(p[1] for p in self.points)

    @property
    def status(self) -> tuple[str, ...]:
        return tuple(p[2] for p in self.points)

    def ok_points(self) -> list[tuple[float, float]]:
        return [(mu, t2) for mu, t2, s in self.points if s == "ok"]


@dataclass(frozen=True)
class SplitReport:
    """All six transmissions for a cut potential, plus the theorem residuals.

    r1 pairs the right half left-to-right with the left half right-to-left
    (the cross-direction equality proven at transparency); r2 pairs the
    complementary orientations.  Failed sub-solves leave their field None
    and record the error class name in ``errors``; a residual is None when
    either member is missing.
    """

    xprime: float
    mu: float
    T2_full_LR: float | None
    T2_full_RL: float | None
    T2_L_LR: float | None
    T2_L_RL: float | None
    T2_R_LR: float | None
    T2_R_RL: float | None
    errors: dict[str, str] = field(default_factory=dict)

    @property
    def r1(self) -> float | None:
        if self.T2_R_LR is None or self.T2_L_RL is None:
            return None
        return abs(self.T2_R_LR - self.T2_L_RL)

    @property
    def r2(self) -> float | None:
        if self.T2_L_LR is None or self.T2_R_RL is None:
            return None
        return abs(self.T2_L_LR - self.T2_R_RL)

    @property
    def pairing_residuals(self) -> tuple[float | None, float | None]:
        return (self.r1, self.r2)


def _solve_t2(
    pot: Potential,
    params: PhysicalParams,
    mu: float,
    C: complex,
    direction: Direction,
    cfg: IntegratorConfig | None,
) -> float:
    problem = ScatterProblem(pot, params.with_mu(mu), C=C, direction=direction)
    return solve_scattering(problem, cfg).T2


def sweep(
    pot: Potential,
    params_base: PhysicalParams,
    mu_lo: float,
    mu_hi: float,
    n_points: int,
    C: complex = 1.0 + 0.0j,
    direction: Direction = Direction.LEFT_TO_RIGHT,
    cfg: IntegratorConfig | None = None,
    threads: int = 1,
) -> TransmissionCurve:
    """Uniform-grid transmission curve; per-point failures are recorded,
    never aborting the sweep."""
    if not mu_lo < mu_hi:
        raise ValueError(f"need mu_lo < mu_hi, got ({mu_lo}, {mu_hi})")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    mus = [mu_lo + (mu_hi - mu_lo) * i / (n_points - 1) for i in range(n_points)]

    def one(mu: float) -> tuple[float, float | None, str]:
        try:
            return (mu, _solve_t2(pot, params_base, mu, C, direction, cfg), "ok")
        except GPScatterError as exc:
            return (mu, None, type(exc).__name__)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = tuple(pool.map(one, mus))
    else:
        points = tuple(one(mu) for mu in mus)
    return TransmissionCurve(points)


def find_resonance(
    pot: Potential,
    params_base: PhysicalParams,
    bracket: tuple[float, float],
    C: complex = 1.0 + 0.0j,
    tol_mu: float = 1e-8,
    tol_T: float = 1e-6,
    cfg: IntegratorConfig | None = None,
    n_scan: int = 61,
) -> float:
    """Locate a unit-transmission resonance inside ``bracket``.

    Deterministic: coarse scan, golden-section maximization of T2 to width
    tol_mu, then residual-root polish (see module docstring).  Raises
    NoResonanceInBracket if the scan shows no interior maximum or the
    polished point misses unit transmission by tol_T or more.

    When the bracket contains several transmission peaks the refinement
    descends from the highest scanned point, so broad peaks win over
    narrow branches that the scan samples only on their flanks.
    """
    mu_a, mu_b = bracket
    if not mu_a < mu_b:
        raise ValueError(f"invalid bracket {bracket}")

    def t2_or_neg_inf(mu: float) -> float:
        try:
            return _solve_t2(pot, params_base, mu, C, Direction.LEFT_TO_RIGHT, cfg)
        except GPScatterError:
            return -math.inf

    scan = [mu_a + (mu_b - mu_a) * i / (n_scan - 1) for i in range(n_scan)]
    values = [t2_or_neg_inf(mu) for mu in scan]
    best = max(range(n_scan), key=lambda i: values[i])
    if best in (0, n_scan - 1) or not math.isfinite(values[best]):
        raise NoResonanceInBracket(
            f"coarse scan of {bracket} shows no interior transmission maximum"
        )

    # golden-section maximization on the bracketing scan triple
    a, b = scan[best - 1], scan[best + 1]
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = t2_or_neg_inf(x1), t2_or_neg_inf(x2)
    while b - a > tol_mu:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = t2_or_neg_inf(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = t2_or_neg_inf(x1)
    mu_max = 0.5 * (a + b)

    mu_res = _polish_transparency(pot, params_base, C, cfg, mu_max, tol_mu)

    t2_res = _solve_t2(pot, params_base, mu_res, C, Direction.LEFT_TO_RIGHT, cfg)
    if 1.0 - t2_res >= tol_T:
        raise NoResonanceInBracket(
            f"maximum at mu={mu_res} has 1 - T2 = {1.0 - t2_res:.3e} >= {tol_T}"
        )
    return mu_res


def _polish_transparency(
    pot: Potential,
    params_base: PhysicalParams,
    C: complex,
    cfg: IntegratorConfig | None,
    mu_max: float,
    tol_mu: float,
) -> float:
    """Refine the T2 maximizer to the zero of the reflection residual."""

    def residual(mu: float) -> complex:
        problem = ScatterProblem(pot, params_base.with_mu(mu), C=C)
        return solve_scattering(problem, cfg).reflection_residual

    h = max(1e-6 * abs(mu_max), 1e-8)

    def s(mu: float) -> float:
        z = residual(mu)
        v = (residual(mu + h) - residual(mu - h)) / (2.0 * h)
        return (z * v.conjugate()).real

    delta = max(100.0 * tol_mu, 1e-6)
    for _ in range(8):
        lo, hi = mu_max - delta, mu_max + delta
        try:
            s_lo, s_hi = s(lo), s(hi)
        except GPScatterError:
            return mu_max
        if s_lo == 0.0:
            return lo
        if s_hi == 0.0:
            return hi
        if (s_lo < 0.0) != (s_hi < 0.0):
            return float(brentq(s, lo, hi, xtol=1e-14, rtol=1e-15))
        delta *= 4.0
    return mu_max  # no sign change found: keep the golden maximizer


def split_check(
    pot: Potential,
    params_base: PhysicalParams,
    mu: float,
    xprime: float,
    C: complex = 1.0 + 0.0j,
    cfg: IntegratorConfig | None = None,
) -> SplitReport:
    """Cut ``pot`` at ``xprime`` and compute all six transmissions.

    The sub-potential problems use default bounds, so the amplitude is read
    off exactly at the cut point (each half's support ends there); this is
    what makes the cross-direction equality exact at transparency.
    """
    left, right = split(pot, xprime)
    jobs = {
        "T2_full_LR": (pot, Direction.LEFT_TO_RIGHT),
        "T2_full_RL": (pot, Direction.RIGHT_TO_LEFT),
        "T2_L_LR": (left, Direction.LEFT_TO_RIGHT),
        "T2_L_RL": (left, Direction.RIGHT_TO_LEFT),
        "T2_R_LR": (right, Direction.LEFT_TO_RIGHT),
        "T2_R_RL": (right, Direction.RIGHT_TO_LEFT),
    }
    values: dict[str, float | None] = {}
    errors: dict[str, str] = {}
    for name, (p, d) in jobs.items():
        try:
            values[name] = _solve_t2(p, params_base, mu, C, d, cfg)
        except GPScatterError as exc:
            values[name] = None
            errors[name] = type(exc).__name__
    return SplitReport(xprime=xprime, mu=mu, errors=errors, **values)


def split_sweep(
    pot: Potential,
    params_base: PhysicalParams,
    mu_lo: float,
    mu_hi: float,
    n_points: int,
    xprime: float,
    C: complex = 1.0 + 0.0j,
    same_direction: bool = False,
    cfg: IntegratorConfig | None = None,
    threads: int = 1,
) -> tuple[TransmissionCurve, TransmissionCurve, TransmissionCurve]:
    """Curves for the full potential and both halves over a mu grid.

    By default the halves run in the proven cross-direction pairing (right
    half left-to-right, left half right-to-left), which makes the half
    curves cross the full curve's unit-transmission point exactly.  With
    ``same_direction=True`` both halves run left-to-right instead.
    """
    left, right = split(pot, xprime)
    left_dir = Direction.LEFT_TO_RIGHT if same_direction else Direction.RIGHT_TO_LEFT
    full = sweep(pot, params_base, mu_lo, mu_hi, n_points, C,
                 Direction.LEFT_TO_RIGHT, cfg, threads)
    left_curve = sweep(left, params_base, mu_lo, mu_hi, n_points, C,
                       left_dir, cfg, threads)
    right_curve = sweep(right, params_base, mu_lo, mu_hi, n_points, C,
                        Direction.LEFT_TO_RIGHT, cfg, threads)
    return full, left_curve, right_curve
