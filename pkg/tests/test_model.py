"""Potential shapes, splitting, support, and wavenumber algebra."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpscatter.errors import ConfigError, NegativeRadicand
from gpscatter.model import (
    DoubleGaussian,
    LeftPart,
    PhysicalParams,
    RectangularWell,
    RightPart,
    Tabulated,
    Zero,
    breakpoints,
    flatten,
    load_tabulated,
    potential_eval,
    reflect,
    split,
    support,
    wavenumber,
)

from physcases import WELL_POT, BUMPS_POT

finite_x = st.floats(min_value=-100.0, max_value=100.0,
                     allow_nan=False, allow_infinity=False)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

def test_params_defaults():
    p = PhysicalParams(mu=1.5)
    assert (p.g, p.m, p.hbar) == (0.0, 1.0, 1.0)


@pytest.mark.parametrize("kwargs", [
    {"mu": 1.0, "m": 0.0},
    {"mu": 1.0, "m": -2.0},
    {"mu": 1.0, "hbar": 0.0},
    {"mu": math.nan},
    {"mu": 1.0, "g": math.inf},
])
def test_params_validation(kwargs):
    with pytest.raises(ConfigError):
        PhysicalParams(**kwargs)


def test_with_mu_replaces_only_mu():
    p = PhysicalParams(mu=1.0, g=-1.0, m=2.0, hbar=3.0)
    q = p.with_mu(4.0)
    assert q == PhysicalParams(mu=4.0, g=-1.0, m=2.0, hbar=3.0)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def test_rect_well_values():
    assert potential_eval(WELL_POT, 0.0) == -50.0
    assert potential_eval(WELL_POT, 20.0) == -50.0   # edges belong to the well
    assert potential_eval(WELL_POT, -20.0) == -50.0
    assert potential_eval(WELL_POT, 25.0) == 0.0
    assert potential_eval(WELL_POT, math.nextafter(20.0, 21.0)) == 0.0


def test_double_gaussian_peak_value():
    # at one hump centre the other hump contributes exp(-(2b/alpha)^2)
    expected = 1.0 * (1.0 + math.exp(-((2 * 7.35 / 1.47) ** 2)))
    assert potential_eval(BUMPS_POT, 7.35) == pytest.approx(expected, rel=1e-15)
    assert potential_eval(BUMPS_POT, 7.35) == pytest.approx(1.0, abs=1e-12)


def test_zero_potential():
    z = Zero()
    assert potential_eval(z, 3.7) == 0.0
    assert support(z) == (0.0, 0.0)


@given(finite_x)
def test_grid_eval_matches_scalar(x):
    # vectorized exp may differ from libm in the last ulp, nothing more
    for pot in (WELL_POT, BUMPS_POT, Zero(), LeftPart(WELL_POT, 3.0)):
        arr = potential_eval(pot, np.array([x]))
        assert arr[0] == pytest.approx(potential_eval(pot, x), rel=1e-14, abs=0.0)


def test_tabulated_interpolation_and_outside():
    tab = Tabulated((0.0, 1.0, 3.0), (0.0, 2.0, 2.0))
    assert potential_eval(tab, 0.5) == 1.0
    assert potential_eval(tab, 2.0) == 2.0
    assert potential_eval(tab, -0.1) == 0.0
    assert potential_eval(tab, 3.1) == 0.0
    assert support(tab) == (0.0, 3.0)


@pytest.mark.parametrize("xs,vs", [
    ((0.0,), (1.0,)),
    ((0.0, 1.0), (1.0,)),
    ((0.0, 0.0), (1.0, 2.0)),
    ((1.0, 0.0), (1.0, 2.0)),
    ((0.0, math.nan), (1.0, 2.0)),
])
def test_tabulated_validation(xs, vs):
    with pytest.raises(ConfigError):
        Tabulated(xs, vs)


def test_shape_validation():
    with pytest.raises(ConfigError):
        RectangularWell(V0=-1.0, a=20.0)
    with pytest.raises(ConfigError):
        RectangularWell(V0=50.0, a=0.0)
    with pytest.raises(ConfigError):
        DoubleGaussian(V0=1.0, b=7.35, alpha=0.0)


# ---------------------------------------------------------------------------
# support
# ---------------------------------------------------------------------------

def test_rect_support_exact():
    assert support(WELL_POT) == (-20.0, 20.0)


def test_double_gaussian_support_formula():
    lo, hi = support(BUMPS_POT, eps=1e-12)
    edge = 7.35 + 1.47 * math.sqrt(math.log(2.0 / 1e-12))
    assert hi == pytest.approx(edge, rel=1e-15)
    assert lo == -hi
    # the tail there is genuinely below eps * max|V|
    assert abs(potential_eval(BUMPS_POT, hi)) <= 1e-12 * 1.0001


def test_support_eps_validation():
    with pytest.raises(ConfigError):
        support(WELL_POT, eps=0.0)


def test_support_shrinks_with_cut():
    left, right = split(WELL_POT, -5.0)
    assert support(left) == (-20.0, -5.0)
    assert support(right) == (-5.0, 20.0)


def test_support_degenerates_when_cut_removes_everything():
    left, _ = split(WELL_POT, -25.0)
    lo, hi = support(left)
    assert lo == hi  # nothing of the well survives left of -25


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------

def test_split_halves_cover_the_shape():
    left, right = split(WELL_POT, -10.0)
    assert isinstance(left, LeftPart) and isinstance(right, RightPart)
    assert potential_eval(left, -15.0) == -50.0
    assert potential_eval(left, -5.0) == 0.0
    assert potential_eval(right, -5.0) == -50.0
    assert potential_eval(right, -15.0) == 0.0
    # both halves include the cut point itself
    assert potential_eval(left, -10.0) == -50.0
    assert potential_eval(right, -10.0) == -50.0


@given(finite_x, finite_x)
def test_split_completeness_bitwise(x, xprime):
    """V_L(x) + V_R(x) == V(x) exactly everywhere except the shared cut."""
    for pot in (WELL_POT, BUMPS_POT):
        if x == xprime:
            continue
        left, right = split(pot, xprime)
        total = potential_eval(left, x) + potential_eval(right, x)
        assert total == potential_eval(pot, x)


def test_split_completeness_bulk():
    rng = np.random.default_rng(1234)
    for pot in (WELL_POT, BUMPS_POT):
        xs = rng.uniform(-40.0, 40.0, size=1000)
        cuts = rng.uniform(-25.0, 25.0, size=1000)
        for x, xp in zip(xs, cuts):
            if x == xp:
                continue
            left, right = split(pot, xp)
            assert potential_eval(left, x) + potential_eval(right, x) == \
                potential_eval(pot, x)


def test_split_outside_support_is_idempotent():
    """Cutting left of the support leaves the right half physically whole."""
    lo, _ = support(WELL_POT)
    left, right = split(WELL_POT, lo - 3.0)
    xs = np.linspace(-30.0, 30.0, 601)
    assert np.all(potential_eval(right, xs) == potential_eval(WELL_POT, xs))
    assert np.all(potential_eval(left, xs) == 0.0)


def test_nested_cuts_intersect_windows():
    pot = LeftPart(RightPart(WELL_POT, -3.0), 5.0)
    flat = flatten(pot)
    assert (flat.w_lo, flat.w_hi) == (-3.0, 5.0)
    assert support(pot) == (-3.0, 5.0)
    assert potential_eval(pot, 0.0) == -50.0
    assert potential_eval(pot, -4.0) == 0.0
    assert potential_eval(pot, 6.0) == 0.0


def test_breakpoints():
    assert breakpoints(WELL_POT) == (-20.0, 20.0)
    assert breakpoints(Zero()) == ()
    pts = breakpoints(LeftPart(WELL_POT, 0.0))
    assert -20.0 in pts and 0.0 in pts


# ---------------------------------------------------------------------------
# reflection
# ---------------------------------------------------------------------------

@given(finite_x)
def test_reflect_is_mirror(x):
    tab = Tabulated((-1.0, 0.0, 2.0), (0.5, 1.0, -0.25))
    for pot in (WELL_POT, BUMPS_POT, tab, LeftPart(tab, 0.5),
                RightPart(WELL_POT, -10.0)):
        assert potential_eval(reflect(pot), x) == \
            pytest.approx(potential_eval(pot, -x), rel=1e-15, abs=0.0)


def test_reflect_symmetric_shapes_identity():
    assert reflect(WELL_POT) is WELL_POT
    assert reflect(BUMPS_POT) is BUMPS_POT


def test_reflect_swaps_cut_sides():
    left, right = split(WELL_POT, -10.0)
    assert isinstance(reflect(left), RightPart)
    assert reflect(left).xprime == 10.0
    assert isinstance(reflect(right), LeftPart)


# ---------------------------------------------------------------------------
# wavenumber
# ---------------------------------------------------------------------------

def test_wavenumber_linear_unit_case():
    assert wavenumber(PhysicalParams(mu=0.5), 7.3) == 1.0  # g = 0: any density


def test_wavenumber_attractive_case():
    k = wavenumber(PhysicalParams(mu=2.135, g=-1.0), 1.0)
    assert k == math.sqrt(6.27)
    assert k == pytest.approx(2.5040, abs=5e-5)


def test_wavenumber_closed_channel():
    with pytest.raises(NegativeRadicand):
        wavenumber(PhysicalParams(mu=0.5, g=1.0), 1.0)


@given(st.floats(min_value=0.0, max_value=50.0), st.floats(min_value=0.01, max_value=10.0))
def test_wavenumber_density_free_when_linear(u, mu):
    p = PhysicalParams(mu=mu, g=0.0)
    assert wavenumber(p, u) == wavenumber(p, 0.0)


@given(st.floats(min_value=0.01, max_value=10.0),
       st.floats(min_value=-2.0, max_value=-0.001),
       st.floats(min_value=0.0, max_value=5.0))
def test_wavenumber_attractive_grows_with_density(mu, g, u):
    p = PhysicalParams(mu=mu, g=g)
    assert wavenumber(p, u) >= wavenumber(p, 0.0)


# ---------------------------------------------------------------------------
# tabulated file loading
# ---------------------------------------------------------------------------

def test_load_tabulated_roundtrip(tmp_path):
    f = tmp_path / "pot.dat"
    f.write_text("# comment line\n-1.0 0.5\n0.0 1.0  # inline comment\n\n2.0 -0.25\n")
    tab = load_tabulated(str(f))
    assert tab.xs == (-1.0, 0.0, 2.0)
    assert tab.vs == (0.5, 1.0, -0.25)


@pytest.mark.parametrize("body", [
    "0.0 1.0 2.0\n1.0 2.0\n",      # three columns
    "0.0 abc\n1.0 2.0\n",          # non-numeric
    "1.0 2.0\n0.0 1.0\n",          # descending
    "0.0 1.0\n0.0 2.0\n",          # duplicate x
    "0.0 1.0\n",                   # single sample
    "0.0 inf\n1.0 2.0\n",          # non-finite
])
def test_load_tabulated_rejects_malformed(tmp_path, body):
    f = tmp_path / "bad.dat"
    f.write_text(body)
    with pytest.raises(ConfigError):
        load_tabulated(str(f))
