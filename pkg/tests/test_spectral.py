import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import ALL_MODELS, COMMUTATIVE
from rkhsdiag.catalog import eval_K, eval_q, get_model
from rkhsdiag.errors import (
    AnchorDegenerate,
    FrequencyOutsideOmega,
    InvalidParam,
    NonScalarFiber,
    SingularAnchorMatrix,
)
from rkhsdiag.spectral import (
    SpectralSample,
    apply_R_to_kernel,
    berezin,
    berezin_denominator,
    gamma,
    gamma_matrix,
    gamma_scalar,
    kernel_diagonal_from_fibers,
    lambda_inverse_matrix,
    lambda_inverse_toeplitz,
    spectrum_range,
)
from rkhsdiag.symbols import SymbolSpec as S

VA = "vertical-analytic"
ONE = S.const(1.0)
IND = S.indicator(0, 1)


def _typical_xi(m):
    return [0, 2, -3] if m.group.dual_is_integer else [0.5, 1.0, 2.5]


def _in_omega(m):
    xs = _typical_xi(m)
    if m.n > 1:
        xs = [(x, -0.5 * x) for x in xs]
    return [x for x in xs if m.omega_contains(x)]


def _mid_y(m):
    lo, hi = m.y_region
    y = lo + 0.4 * (hi - lo)
    return y if m.n == 1 else (y,) * m.n


# --- gamma ----------------------------------------------------------------------

@pytest.mark.parametrize("model_id", ALL_MODELS)
def test_constant_symbol_gives_identity(model_id):
    m = get_model(model_id)
    for xi in _in_omega(m):
        g = gamma_matrix(m, ONE, xi)
        assert np.allclose(g, np.eye(m.fiber_count(xi)), atol=1e-10)


def test_gamma_examples():
    assert gamma_scalar(get_model(VA), IND, 1.0) == pytest.approx(1 - math.exp(-2), abs=1e-10)
    assert abs(gamma_scalar(get_model(VA), IND, 1.0) - 0.8646647168) < 1e-10
    ra = get_model("radial-analytic")
    for xi in (0, 1, 2):
        assert gamma_scalar(ra, S.power(2), xi) == pytest.approx((xi + 1) / (xi + 2), abs=1e-10)


# mpmath evaluations of the printed spectral-function integrals, frozen
FROZEN = [
    ("vertical-true-poly", S.indicator(0, 1), 1.0, 0.323323583816936540530),
    ("angular-analytic", S.indicator(0, math.pi / 2), 1.0, 0.958576167833637173187),
    ("radial-harmonic", S.expdecay(1), -2, 0.427813068658818959156),
    ("wavelet-affine", S.indicator(0.1, 0.3), 1.0, 0.809455413622878278024),
    ("wavelet-affine", S.expdecay(1), 2.0, 0.900277628537354627636),
    ("gaussian-rbf", S.indicator(0, 1), 0.5, 0.0131603164038283518952),
    ("vertical-harmonic", S.expdecay(0.5), -2.0, 4 / 4.5),
]


@pytest.mark.parametrize("model_id,psi,xi,expected", FROZEN)
def test_gamma_frozen_oracles(model_id, psi, xi, expected):
    assert gamma_scalar(get_model(model_id), psi, xi).real == pytest.approx(expected, abs=1e-9)


def test_gamma_matrix_frozen_oracle():
    # entries 2 int e^{-3v} L_j(2v) L_k(2v) dv, mpmath
    g = gamma_matrix(get_model("vertical-poly", n=2), S.expdecay(1), 1.0)
    assert np.allclose(g, [[2 / 3, 2 / 9], [2 / 9, 10 / 27]], atol=1e-10)


def test_gamma_matrix_hermitian_for_real_symbols():
    g = gamma_matrix(get_model("vertical-poly", n=3), S.indicator(0.2, 1.5), 0.7)
    assert np.allclose(g, g.conj().T, atol=1e-10)


def test_gamma_matrix_indicator_covering_Y_is_identity():
    g = gamma_matrix(get_model("vertical-poly", n=2), S.indicator(0, 1e6), 1.0)
    assert np.allclose(g, np.eye(2), atol=1e-8)


def test_gamma_errors():
    with pytest.raises(FrequencyOutsideOmega):
        gamma_scalar(get_model(VA), IND, -1.0)
    with pytest.raises(NonScalarFiber):
        gamma_scalar(get_model("vertical-poly", n=2), IND, 1.0)
    with pytest.raises(InvalidParam):
        gamma_scalar(get_model(VA), S.power(1), 1.0)


def test_gamma_sample_shapes():
    assert not gamma(get_model(VA), IND, 1.0).is_matrix
    s = gamma(get_model("vertical-poly", n=3), IND, 1.0)
    assert s.is_matrix and s.value.shape == (3, 3)
    assert SpectralSample(1.0, 0.5 + 0j).to_dict() == {"xi": 1.0, "re": 0.5, "im": 0.0}


def test_radial_harmonic_gamma_is_even():
    m = get_model("radial-harmonic")
    for xi in (1, 2, 5):
        assert gamma_scalar(m, IND, xi) == gamma_scalar(m, IND, -xi)


def test_complex_callback_symbol():
    psi = S.from_callable(lambda v: 1j * math.exp(-v))
    assert gamma_scalar(get_model(VA), psi, 1.0) == pytest.approx(2j / 3, abs=1e-10)


@pytest.mark.parametrize("model_id", [c for c in COMMUTATIVE if c != "gaussian-rbf"])
def test_closed_form_spectral_functions(model_id):
    m = get_model(model_id)
    lo, hi = m.y_region
    symbols = [S.indicator(lo, 0.5 * (lo + hi))]
    if math.isfinite(m.y_bounds[0]):
        symbols.append(S.expdecay(1.3))
    for psi in symbols:
        for xi in _in_omega(m):
            assert abs(gamma_scalar(m, psi, xi) - m.gamma_closed(psi, xi)) <= 1e-7


@settings(max_examples=15, deadline=None)
@given(a=st.floats(0.0, 3.0), b=st.floats(0.1, 4.0), xi=st.floats(0.1, 5.0))
def test_averaging_bounds(a, b, xi):
    psi = S.indicator(a, a + b)
    g = gamma_scalar(get_model(VA), psi, xi)
    assert -1e-12 <= g.real <= 1 + 1e-12
    assert abs(g.imag) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(al=st.floats(-3, 3), be=st.floats(-3, 3), xi=st.floats(0.2, 3.0))
def test_linearity(al, be, xi):
    m = get_model("vertical-harmonic")
    p1, p2 = S.expdecay(0.7), S.indicator(0.5, 2.0)
    combo = S.from_callable(lambda v: al * p1(v) + be * p2(v))
    lhs = gamma_scalar(m, combo, xi)
    rhs = al * gamma_scalar(m, p1, xi) + be * gamma_scalar(m, p2, xi)
    assert abs(lhs - rhs) <= 1e-9


# --- transform R and Lambda inverse ---------------------------------------------------

def test_R_on_kernel_examples():
    val = apply_R_to_kernel(get_model(VA), 1.0, 1.0)
    assert val == pytest.approx((2 / math.pi) ** 0.25 * math.exp(-1), abs=1e-10)
    val = apply_R_to_kernel(get_model("radial-analytic"), 0.5, 2)
    assert val == pytest.approx(math.sqrt(6) * 0.25, abs=1e-10)


def test_R_on_kernel_matrix_fiber():
    m = get_model("vertical-poly", n=2)
    vec = apply_R_to_kernel(m, 0.7, 1.0)
    assert np.allclose(vec, np.conj([eval_q(m, 1.0, j, 0.7) for j in (1, 2)]), atol=1e-8)


def test_lambda_inverse_examples():
    m = get_model(VA)
    assert lambda_inverse_toeplitz(m, ONE, 1.0, 2.0) == pytest.approx(1.0, abs=1e-10)
    assert lambda_inverse_toeplitz(m, IND, 1.0, 0.5) == pytest.approx(1 - math.exp(-2), abs=1e-7)


def test_degenerate_anchor():
    with pytest.raises(AnchorDegenerate):
        lambda_inverse_toeplitz(get_model("radial-analytic"), ONE, 3, 1e-6)


def test_lambda_inverse_matrix_examples():
    m = get_model("vertical-poly", n=2)
    assert np.allclose(lambda_inverse_matrix(m, ONE, 1.0), np.eye(2), atol=1e-6)
    sig = lambda_inverse_matrix(m, S.expdecay(1), 1.0, [0.3, 1.1])
    assert np.allclose(sig, gamma_matrix(m, S.expdecay(1), 1.0), atol=1e-6)
    with pytest.raises(SingularAnchorMatrix):
        lambda_inverse_matrix(m, ONE, 1.0, [0.4, 0.4])


def test_default_anchors_redrawn_when_singular(monkeypatch):
    from rkhsdiag import spectral
    original = spectral.default_anchors
    seen = []

    def collinear_first(model, d, seed=0):
        seen.append(seed)
        return [0.5] * d if seed == 0 else original(model, d, seed)

    monkeypatch.setattr(spectral, "default_anchors", collinear_first)
    m = get_model("vertical-poly", n=3)
    sig = lambda_inverse_matrix(m, IND, 2.0)
    assert seen[:2] == [0, 1]
    assert np.allclose(sig, gamma_matrix(m, IND, 2.0), atol=1e-6)


# --- Berezin, Parseval, spectrum -------------------------------------------------------

def test_berezin_examples():
    m = get_model(VA)
    for y in (0.5, 1.0, 2.0):
        assert berezin(m, ONE, y) == pytest.approx(1.0, abs=1e-8)
    assert berezin_denominator(m, 1.0) == pytest.approx(1 / (4 * math.pi), abs=1e-10)
    # 4 pi int (1 - e^{-2 xi}) (xi / pi) e^{-2 xi} d xi = 3/4
    assert berezin(m, IND, 1.0) == pytest.approx(0.75, abs=1e-8)


FROZEN_BEREZIN = [
    (VA, S.expdecay(1), 0.5, 0.730727658120932617208),
    ("radial-analytic", S.power(2), 0.5, 0.589138652066028346953),
]


@pytest.mark.parametrize("model_id,psi,y,expected", FROZEN_BEREZIN)
def test_berezin_frozen_oracles(model_id, psi, y, expected):
    assert berezin(get_model(model_id), psi, y).real == pytest.approx(expected, abs=1e-8)


def test_berezin_constant_symbol_matrix_fiber():
    assert berezin(get_model("vertical-poly", n=2), S.const(2.5), 0.8) == pytest.approx(2.5, abs=1e-8)


def test_berezin_stays_inside_symbol_range():
    b = berezin(get_model("angular-analytic"), S.indicator(0.5, 2.0), 1.0)
    assert 0 < b.real < 1


@pytest.mark.parametrize("model_id", ALL_MODELS)
def test_parseval_at_the_kernel(model_id):
    m = get_model(model_id)
    lo, hi = m.y_region
    for t in (0.2, 0.5, 0.8):
        y = lo + t * (hi - lo)
        y = y if m.n == 1 else (y,) * m.n
        zero = 0.0 if m.n == 1 else (0.0,) * m.n
        ref = eval_K(m, zero, y, zero, y).real
        assert kernel_diagonal_from_fibers(m, y) == pytest.approx(ref, rel=1e-6)


def test_spectrum_range_examples():
    m = get_model(VA)
    r = spectrum_range(m, S.const(0.3), [0.5, 1.0, 3.0])
    assert r.min == pytest.approx(0.3) and r.max == pytest.approx(0.3) and r.sup_norm == pytest.approx(0.3)
    r = spectrum_range(m, IND, [0.25, 4.0])
    assert r.min == pytest.approx(1 - math.exp(-0.5), abs=1e-10)
    assert r.max == pytest.approx(1 - math.exp(-8), abs=1e-10)
    assert abs(r.min - 0.3934693403) < 1e-10 and abs(r.max - 0.9996645374) < 1e-10
    assert r.xi_grid == (0.25, 4.0)


def test_spectrum_range_skips_frequencies_outside_omega():
    r = spectrum_range(get_model(VA), IND, [-1.0, 1.0])
    assert r.xi_grid == (1.0,)
    with pytest.raises(FrequencyOutsideOmega):
        spectrum_range(get_model(VA), IND, [-1.0])


def test_spectrum_range_matrix_fiber_within_symbol_bounds():
    r = spectrum_range(get_model("vertical-poly", n=2), IND)
    assert 0 <= r.min <= r.max <= 1


def test_spectrum_range_needs_real_symbol():
    with pytest.raises(ValueError):
        spectrum_range(get_model(VA), S.from_callable(lambda v: 1j), [1.0])
