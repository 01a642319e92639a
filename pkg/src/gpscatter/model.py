"""Physical parameters, potential shapes, splitting, and wavenumber algebra.

Everything here is immutable after construction and safe to share across
worker threads.  Potentials are a small tagged family: two analytic shapes,
a tabulated shape, the zero potential, and two window wrappers (``LeftPart``,
``RightPart``) that realize cutting a potential at a point.  Arbitrary
nesting of the wrappers reduces to the base shape restricted to one closed
window, which is what the flattened form handed to the integrator encodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .errors import ConfigError, NegativeRadicand

__all__ = [
    "PhysicalParams",
    "Potential",
    "RectangularWell",
    "DoubleGaussian",
    "Tabulated",
    "Zero",
    "LeftPart",
    "RightPart",
    "FlatPotential",
    "potential_eval",
    "support",
    "split",
    "reflect",
    "wavenumber",
    "breakpoints",
    "flatten",
    "load_tabulated",
]

_EMPTY = np.empty(0, dtype=np.float64)


@dataclass(frozen=True)
class PhysicalParams:
    """Mass, Planck constant, interaction strength, and chemical potential.

    Dimensionless units with m = hbar = 1 are the common case, but m and
    hbar are kept general so dimensional checks remain possible.
    """

    mu: float
    g: float = 0.0
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not (self.m > 0.0):
            raise ConfigError(f"mass must be positive, got {self.m}")
        if not (self.hbar > 0.0):
            raise ConfigError(f"hbar must be positive, got {self.hbar}")
        for name in ("mu", "g", "m", "hbar"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite, got {v}")

    def with_mu(self, mu: float) -> "PhysicalParams":
        return replace(self, mu=mu)


def wavenumber(params: PhysicalParams, density: float) -> float:
    """Asymptotic wavenumber sqrt(2m(mu - g*density))/hbar.

    ``density`` is |amplitude|^2 of the plane wave carried by the channel.
    Raises :class:`NegativeRadicand` when the channel is closed; callers
    must surface that condition rather than clamp it.
    """
    radicand = params.mu - params.g * density
    if radicand < 0.0:
        raise NegativeRadicand(
            f"mu - g*density = {params.mu} - {params.g}*{density} = {radicand} < 0"
        )
    return math.sqrt(2.0 * params.m * radicand) / params.hbar


class PotentialBase:
    """Common interface; concrete shapes below."""

    def evaluate(self, x: float) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def evaluate_grid(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


@dataclass(frozen=True)
class RectangularWell(PotentialBase):
    """V(x) = -V0 on |x| <= a, 0 outside."""

    V0: float
    a: float

    def __post_init__(self) -> None:
        if not (self.V0 > 0.0 and self.a > 0.0):
            raise ConfigError("RectangularWell needs V0 > 0 and a > 0")

    def evaluate(self, x: float) -> float:
        return -self.V0 if -self.a <= x <= self.a else 0.0

    def evaluate_grid(self, x: np.ndarray) -> np.ndarray:
        return np.where(np.abs(x) <= self.a, -self.V0, 0.0)


@dataclass(frozen=True)
class DoubleGaussian(PotentialBase):
    """V(x) = V0*[exp(-((x+b)/alpha)^2) + exp(-((x-b)/alpha)^2)]."""

    V0: float
    b: float
    alpha: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0):
            raise ConfigError("DoubleGaussian needs alpha > 0")

    def evaluate(self, x: float) -> float:
        return self.V0 * (
            math.exp(-(((x + self.b) / self.alpha) ** 2))
            + math.exp(-(((x - self.b) / self.alpha) ** 2))
        )

    def evaluate_grid(self, x: np.ndarray) -> np.ndarray:
        return self.V0 * (
            np.exp(-(((x + self.b) / self.alpha) ** 2))
            + np.exp(-(((x - self.b) / self.alpha) ** 2))
        )


@dataclass(frozen=True)
class Tabulated(PotentialBase):
    """Piecewise-linear interpolation of (x, V) samples, 0 outside the range."""

    xs: tuple[float, ...]
    vs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.xs) != len(self.vs) or len(self.xs) < 2:
            raise ConfigError("Tabulated needs >= 2 matching (x, V) samples")
        arr_x = np.asarray(self.xs, dtype=np.float64)
        arr_v = np.asarray(self.vs, dtype=np.float64)
        if not (np.all(np.isfinite(arr_x)) and np.all(np.isfinite(arr_v))):
            raise ConfigError("Tabulated samples must be finite")
        if not np.all(np.diff(arr_x) > 0.0):
            raise ConfigError("Tabulated x samples must be strictly increasing")
        object.__setattr__(self, "_xs_arr", arr_x)
        object.__setattr__(self, "_vs_arr", arr_v)

    def evaluate(self, x: float) -> float:
        xs = self._xs_arr  # type: ignore[attr-defined]
        if x < xs[0] or x > xs[-1]:
            return 0.0
        return float(np.interp(x, xs, self._vs_arr))  # type: ignore[attr-defined]

    def evaluate_grid(self, x: np.ndarray) -> np.ndarray:
        xs = self._xs_arr  # type: ignore[attr-defined]
        vs = self._vs_arr  # type: ignore[attr-defined]
        inside = (x >= xs[0]) & (x <= xs[-1])
        return np.where(inside, np.interp(x, xs, vs), 0.0)


@dataclass(frozen=True)
class Zero(PotentialBase):
    """Identically zero potential."""

    def evaluate(self, x: float) -> float:
        return 0.0

    def evaluate_grid(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=np.float64))


@dataclass(frozen=True)
class LeftPart(PotentialBase):
    """inner(x) for x <= xprime, 0 for x > xprime (cut point included)."""

    inner: "Potential"
    xprime: float

    def evaluate(self, x: float) -> float:
        return self.inner.evaluate(x) if x <= self.xprime else 0.0

    def evaluate_grid(self, x: np.ndarray) -> np.ndarray:
        return np.where(x <= self.xprime, self.inner.evaluate_grid(x), 0.0)


@dataclass(frozen=True)
class RightPart(PotentialBase):
    """0 for x < xprime, inner(x) for x >= xprime (cut point included)."""

    inner: "Potential"
    xprime: float

    def evaluate(self, x: float) -> float:
        return self.inner.evaluate(x) if x >= self.xprime else 0.0

    def evaluate_grid(self, x: np.ndarray) -> np.ndarray:
        return np.where(x >= self.xprime, self.inner.evaluate_grid(x), 0.0)


Potential = Union[RectangularWell, DoubleGaussian, Tabulated, Zero, LeftPart, RightPart]


def potential_eval(pot: Potential, x):
    """Evaluate V(x); accepts a scalar or a numpy array."""
    if np.ndim(x) == 0:
        return pot.evaluate(float(x))
    return pot.evaluate_grid(np.asarray(x, dtype=np.float64))


# --------------------------------------------------------------------------
# flattened form: base shape + one closed window, for the integrator kernel
# --------------------------------------------------------------------------

TAG_ZERO = 0
TAG_RECT = 1
TAG_DOUBLE_GAUSSIAN = 2
TAG_TABULATED = 3


@dataclass(frozen=True)
class FlatPotential:
    """Base shape parameters plus the closed window [w_lo, w_hi].

    Outside the window the potential is exactly zero.  Nested Left/Right
    wrappers intersect their half-lines into this single window.
    """

    tag: int
    p0: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    w_lo: float = -math.inf
    w_hi: float = math.inf
    xs: np.ndarray = field(default_factory=lambda: _EMPTY)
    vs: np.ndarray = field(default_factory=lambda: _EMPTY)


def flatten(pot: Potential) -> FlatPotential:
    w_lo, w_hi = -math.inf, math.inf
    base = pot
    while isinstance(base, (LeftPart, RightPart)):
        if isinstance(base, LeftPart):
            w_hi = min(w_hi, base.xprime)
        else:
            w_lo = max(w_lo, base.xprime)
        base = base.inner
    if isinstance(base, Zero):
        return FlatPotential(TAG_ZERO, w_lo=w_lo, w_hi=w_hi)
    if isinstance(base, RectangularWell):
        return FlatPotential(TAG_RECT, base.V0, base.a, 0.0, w_lo, w_hi)
    if isinstance(base, DoubleGaussian):
        return FlatPotential(
            TAG_DOUBLE_GAUSSIAN, base.V0, base.b, base.alpha, w_lo, w_hi
        )
    if isinstance(base, Tabulated):
        return FlatPotential(
            TAG_TABULATED,
            w_lo=w_lo,
            w_hi=w_hi,
            xs=base._xs_arr,  # type: ignore[attr-defined]
            vs=base._vs_arr,  # type: ignore[attr-defined]
        )
    raise TypeError(f"unknown potential variant: {type(base).__name__}")


# --------------------------------------------------------------------------
# support, breakpoints, splitting, reflection
# --------------------------------------------------------------------------

def _base_support(base: Potential, eps: float) -> tuple[float, float]:
    if isinstance(base, Zero):
        return (0.0, 0.0)
    if isinstance(base, RectangularWell):
        return (-base.a, base.a)
    if isinstance(base, DoubleGaussian):
        # outermost solution of 2*exp(-(d/alpha)^2) = eps, placed at +-b
        d = base.alpha * math.sqrt(math.log(2.0 / eps))
        return (-(base.b + d), base.b + d)
    if isinstance(base, Tabulated):
        return (base.xs[0], base.xs[-1])
    raise TypeError(type(base).__name__)


def support(pot: Potential, eps: float = 1e-12) -> tuple[float, float]:
    """Interval outside which |V| < eps * max|V| (exact for compact shapes)."""
    if eps <= 0.0:
        raise ConfigError("support eps must be positive")
    flat = flatten(pot)
    base = pot
    while isinstance(base, (LeftPart, RightPart)):
        base = base.inner
    if isinstance(base, Zero):
        return (0.0, 0.0)
    lo, hi = _base_support(base, eps)
    lo = max(lo, flat.w_lo)
    hi = min(hi, flat.w_hi)
    if lo > hi:  # the window removed the entire support
        mid = 0.5 * (lo + hi)
        return (mid, mid)
    return (lo, hi)


def breakpoints(pot: Potential) -> tuple[float, ...]:
    """Positions where V may jump; the integrator never steps across them."""
    flat = flatten(pot)
    pts: set[float] = set()
    if flat.tag == TAG_RECT:
        pts.update((-flat.p1, flat.p1))
    elif flat.tag == TAG_TABULATED:
        pts.update((float(flat.xs[0]), float(flat.xs[-1])))
    for w in (flat.w_lo, flat.w_hi):
        if math.isfinite(w):
            pts.add(w)
    return tuple(sorted(pts))


def split(pot: Potential, xprime: float) -> tuple[LeftPart, RightPart]:
    """Cut the potential at xprime; both halves include the cut point."""
    return LeftPart(pot, xprime), RightPart(pot, xprime)


def reflect(pot: Potential) -> Potential:
    """The mirror potential V(-x)."""
    if isinstance(pot, (Zero, RectangularWell, DoubleGaussian)):
        return pot  # symmetric about the origin by construction
    if isinstance(pot, Tabulated):
        return Tabulated(tuple(-x for x in reversed(pot.xs)), tuple(reversed(pot.vs)))
    if isinstance(pot, LeftPart):
        return RightPart(reflect(pot.inner), -pot.xprime)
    if isinstance(pot, RightPart):
        return LeftPart(reflect(pot.inner), -pot.xprime)
    raise TypeError(type(pot).__name__)


def load_tabulated(path: str) -> Tabulated:
    """Parse a two-column ``x V`` text file ('#' comments allowed)."""
    xs: list[float] = []
    vs: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                x, v = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: non-numeric entry") from exc
            if not (math.isfinite(x) and math.isfinite(v)):
                raise ConfigError(f"{path}:{lineno}: non-finite entry")
            xs.append(x)
            vs.append(v)
    if len(xs) < 2:
        raise ConfigError(f"{path}: need at least two samples")
    diffs = np.diff(xs)
    if np.any(diffs == 0.0):
        raise ConfigError(f"{path}: duplicate x values")
    if np.any(diffs < 0.0):
        raise ConfigError(f"{path}: x values must be strictly increasing")
    return Tabulated(tuple(xs), tuple(vs))
