"""Linear (g = 0) reference results: closed forms and transfer matrices.

This module is the independent oracle for the nonlinear ODE pipeline.  It
never integrates anything; transmission comes from composing 2x2 transfer
matrices across piecewise-constant segments, and the rectangular well has
an exact closed form on top of that.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyRange, NotResonant
from .model import Potential, breakpoints, potential_eval, support

__all__ = [
    "TransferMatrix",
    "identity",
    "step_matrix",
    "compose",
    "potential_matrix",
    "transmission",
    "reflection",
    "rect_well_transmission",
    "rect_resonance_energies",
    "linear_split_reflection_check",
    "LinearSplitReport",
]


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex matrix [[alpha, beta], [beta*, alpha*]] of unit determinant.

    Maps plane-wave amplitude pairs (A, B), with phase references e^{+-ikx}
    anchored at the true position x, from the left side of a region to the
    right side.  Free propagation is therefore the identity matrix.
    """

    alpha: complex
    beta: complex

    @property
    def det(self) -> float:
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2


def identity() -> TransferMatrix:
    return TransferMatrix(1.0 + 0.0j, 0.0 + 0.0j)


def transmission(m: TransferMatrix) -> float:
    """|T|^2 = 1/|alpha|^2 for a unit-amplitude incoming wave."""
    return 1.0 / abs(m.alpha) ** 2


def reflection(m: TransferMatrix) -> float:
    """|R|^2 = |beta/alpha|^2."""
    return abs(m.beta / m.alpha) ** 2


def compose(m_right: TransferMatrix, m_left: TransferMatrix) -> TransferMatrix:
    """Matrix product M_right * M_left (left segment traversed first)."""
    a = m_right.alpha * m_left.alpha + m_right.beta * m_left.beta.conjugate()
    b = m_right.alpha * m_left.beta + m_right.beta * m_left.alpha.conjugate()
    return TransferMatrix(a, b)


def step_matrix(
    E: float,
    V_segment: float,
    x_left: float,
    x_right: float,
    m: float = 1.0,
    hbar: float = 1.0,
) -> TransferMatrix:
    """Transfer matrix of one constant-level segment [x_left, x_right].

    Propagating interiors use trigonometric matching, evanescent interiors
    (E < V_segment) hyperbolic matching; both keep the 2x2 propagator real,
    which preserves the [[alpha, beta], [beta*, alpha*]] structure exactly.
    """
    if E <= 0.0:
        raise DomainError(f"asymptotic channel requires E > 0, got {E}")
    if not x_right > x_left:
        raise DomainError("x_right must exceed x_left")
    L = x_right - x_left
    k = math.sqrt(2.0 * m * E) / hbar
    diff = 2.0 * m * (E - V_segment) / hbar**2
    if diff > 0.0:
        q = math.sqrt(diff)
        p00 = math.cos(q * L)
        p01 = math.sin(q * L) / q
        p10 = -q * math.sin(q * L)
    elif diff < 0.0:
        kap = math.sqrt(-diff)
        p00 = math.cosh(kap * L)
        p01 = math.sinh(kap * L) / kap
        p10 = kap * math.sinh(kap * L)
    else:
        p00, p01, p10 = 1.0, L, 0.0
    p11 = p00
    # image of (A, B) = (1, 0): psi = e^{ikx_left}, psi' = ik psi.
    # The matrix column is (alpha, beta*), so beta is the conjugate of the
    # downstream counter-propagating amplitude of this image.
    psi0 = cmath.exp(1j * k * x_left)
    dpsi0 = 1j * k * psi0
    psi1 = p00 * psi0 + p01 * dpsi0
    dpsi1 = p10 * psi0 + p11 * dpsi0
    a_out = 0.5 * cmath.exp(-1j * k * x_right) * (psi1 + dpsi1 / (1j * k))
    b_out = 0.5 * cmath.exp(1j * k * x_right) * (psi1 - dpsi1 / (1j * k))
    return TransferMatrix(a_out, b_out.conjugate())


def potential_matrix(
    pot: Potential,
    E: float,
    m: float = 1.0,
    hbar: float = 1.0,
    n_segments: int = 2048,
    eps: float = 1e-12,
) -> TransferMatrix:
    """Piecewise-constant midpoint discretization composed across the support.

    Segment edges are aligned to the potential's jump positions, so shapes
    that are genuinely piecewise constant are represented exactly.
    """
    lo, hi = support(pot, eps)
    if hi <= lo:
        return identity()
    edges = sorted({lo, hi, *(b for b in breakpoints(pot) if lo < b < hi)})
    total = hi - lo
    acc = identity()
    for piece_lo, piece_hi in zip(edges[:-1], edges[1:]):
        length = piece_hi - piece_lo
        cells = max(1, int(round(n_segments * length / total)))
        xs = np.linspace(piece_lo, piece_hi, cells + 1)
        for x0, x1 in zip(xs[:-1], xs[1:]):
            v_mid = potential_eval(pot, 0.5 * (x0 + x1))
            acc = compose(step_matrix(E, v_mid, float(x0), float(x1), m, hbar), acc)
    return acc


def rect_well_transmission(
    E: float, V0: float, a: float, m: float = 1.0, hbar: float = 1.0
) -> float:
    """Closed-form |T|^2 of the rectangular well of depth V0 and width 2a."""
    if E <= 0.0:
        raise DomainError(f"requires E > 0, got {E}")
    q2a = 2.0 * a * math.sqrt(2.0 * m * (E + V0)) / hbar
    corr = V0**2 / (4.0 * E * (E + V0)) * math.sin(q2a) ** 2
    return 1.0 / (1.0 + corr)


def rect_resonance_energies(
    V0: float,
    a: float,
    m: float = 1.0,
    hbar: float = 1.0,
    n_range=range(1, 256),
) -> list[float]:
    """Positive energies E_n = -V0 + (hbar*pi*n)^2 / (8 m a^2), ascending.

    At these energies the well's interior phase is a half-integer number of
    wavelengths and the closed-form transmission equals exactly 1.
    """
    energies = []
    for n in n_range:
        e_n = -V0 + (hbar * math.pi * n) ** 2 / (8.0 * m * a**2)
        if e_n > 0.0:
            energies.append(e_n)
    if not energies:
        raise EmptyRange("no positive resonance energy in the requested range")
    return sorted(energies)


@dataclass(frozen=True)
class LinearSplitReport:
    """|beta/alpha| of both halves of a cut potential at a resonance."""

    E: float
    xprime: float
    R_left: float
    R_right: float
    difference: float
    T2_full: float


def linear_split_reflection_check(
    pot: Potential,
    E_res: float,
    xprime: float,
    m: float = 1.0,
    hbar: float = 1.0,
    n_segments: int = 2048,
    tolerance: float = 1e-6,
) -> LinearSplitReport:
    """At a unit-transmission energy, both halves reflect equally strongly.

    Verifies |beta_L/alpha_L| = |beta_R/alpha_R| via transfer matrices.
    """
    from .model import split  # local import to avoid cycle at module load

    m_full = potential_matrix(pot, E_res, m, hbar, n_segments)
    t2_full = transmission(m_full)
    if 1.0 - t2_full > tolerance:
        raise NotResonant(
            f"1 - T2 = {1.0 - t2_full:.3e} > {tolerance} at E = {E_res}"
        )
    left, right = split(pot, xprime)
    m_l = potential_matrix(left, E_res, m, hbar, n_segments)
    m_r = potential_matrix(right, E_res, m, hbar, n_segments)
    r_l = abs(m_l.beta / m_l.alpha)
    r_r = abs(m_r.beta / m_r.alpha)
    return LinearSplitReport(E_res, xprime, r_l, r_r, abs(r_l - r_r), t2_full)
