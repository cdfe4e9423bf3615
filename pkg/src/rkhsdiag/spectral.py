"""
Spectral data of invariant Toeplitz operators.

An invariant Toeplitz operator with symbol ``psi(v)`` acts on each fiber
as multiplication by ``gamma_psi(xi)``: a scalar when the fiber is a line
and a ``d x d`` matrix in the orthonormal basis ``q_{1,xi}, ..., q_{d,xi}``
otherwise. This module computes ``gamma`` directly from the basis, and
again through the kernel-side route ``sigma = (R T K_{0,y}) / conj(q(y))``
so the two can be compared. It also evaluates the Berezin transform and
inner estimates of the spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .catalog import KernelModel, eval_Q
from .errors import (
    AnchorDegenerate,
    DenominatorUnderflow,
    FrequencyOutsideOmega,
    NonScalarFiber,
    SingularAnchorMatrix,
)
from .fiber import compute_L_numeric, default_xi_grid, split_coordinates
from .quadrature import DEFAULT_SPEC, QuadSpec, integrate
from .symbols import SymbolSpec

ANCHOR_MIN = 1e-8
ANCHOR_COND_MAX = 1e8
UNDERFLOW = 1e-30
# share of the outer window assumed for one inner error in apply_R_to_kernel
_R_BUDGET = 16.0

_ONE = SymbolSpec.const(1.0)


@dataclass
class SpectralSample:
    """``gamma(xi)``: a complex scalar or a ``d x d`` complex matrix."""

    xi: object
    value: object

    @property
    def is_matrix(self) -> bool:
        return isinstance(self.value, np.ndarray)

    def to_dict(self) -> dict:
        xi = list(self.xi) if isinstance(self.xi, tuple) else self.xi
        if self.is_matrix:
            v = self.value
            return {"xi": xi, "d": int(v.shape[0]),
                    "re": v.real.tolist(), "im": v.imag.tolist()}
        return {"xi": xi, "re": float(np.real(self.value)), "im": float(np.imag(self.value))}


class SpectrumRange(NamedTuple):
    """Inner estimate of the essential range of ``gamma`` over a finite grid."""

    min: float
    max: float
    sup_norm: float
    xi_grid: tuple = ()


def _inside(model, xi):
    xi = model.frequency(xi)
    if not model.omega_contains(xi):
        raise FrequencyOutsideOmega(f"xi={xi!r} is outside Omega of {model.id}")
    return xi


def _coordinate_symbols(model, psi):
    # builtins act on the first coordinate; the rest see the constant one
    return [psi] + [_ONE] * (model.n - 1)


def _y_integral(coord, f, psi, spec, what):
    return integrate(lambda w: psi(w) * f(w), coord.y_measure, spec,
                     psi.breakpoints()).require(what)


def gamma_scalar(model: KernelModel, psi: SymbolSpec, xi, spec: QuadSpec = DEFAULT_SPEC) -> complex:
    """``gamma_psi(xi) = int_Y psi |q_xi|^2 d(lambda)`` for one-dimensional fibers.

    Raises
    ------
    FrequencyOutsideOmega
    NonScalarFiber
        If the fiber at ``xi`` has dimension above one.
    """
    xi = _inside(model, xi)
    model.symbol_on_y(psi)
    if model.fiber_count(xi) > 1:
        raise NonScalarFiber(f"fiber at xi={xi!r} has dimension {model.fiber_count(xi)}; use gamma_matrix")
    total = 1.0 + 0j
    for (coord, c), p in zip(split_coordinates(model, xi), _coordinate_symbols(model, psi)):
        total *= _y_integral(coord, lambda w: abs(coord.Q_closed(c, 1, w)) ** 2, p, spec,
                             "spectral-function integral")
    return total


def gamma_matrix(model: KernelModel, psi: SymbolSpec, xi, spec: QuadSpec = DEFAULT_SPEC) -> np.ndarray:
    """Entries ``int_Y psi conj(q_j) q_k d(lambda)``, a ``d x d`` complex matrix."""
    xi = _inside(model, xi)
    d = model.fiber_count(xi)
    if d == 1:
        return np.array([[gamma_scalar(model, psi, xi, spec)]])
    model.symbol_on_y(psi)
    out = np.empty((d, d), dtype=complex)
    for j in range(1, d + 1):
        for k in range(j, d + 1):
            val = _y_integral(model, lambda w: np.conj(model.Q_closed(xi, j, w)) * model.Q_closed(xi, k, w),
                              psi, spec, "spectral-matrix integral")
            out[j - 1, k - 1] = val
            if k != j:
                # conj(q_j) q_k and conj(q_k) q_j are conjugate; exact for real psi
                out[k - 1, j - 1] = (np.conj(val) if psi.is_real else
                                     _y_integral(model, lambda w: np.conj(model.Q_closed(xi, k, w))
                                                 * model.Q_closed(xi, j, w), psi, spec,
                                                 "spectral-matrix integral"))
    return out


def gamma(model: KernelModel, psi: SymbolSpec, xi, spec: QuadSpec = DEFAULT_SPEC) -> SpectralSample:
    """:func:`gamma_scalar` or :func:`gamma_matrix`, whichever fits the fiber."""
    xi = _inside(model, xi)
    if model.fiber_count(xi) == 1:
        return SpectralSample(xi, gamma_scalar(model, psi, xi, spec))
    return SpectralSample(xi, gamma_matrix(model, psi, xi, spec))


def apply_R_to_kernel(model: KernelModel, y, xi, spec: QuadSpec = DEFAULT_SPEC):
    """``(R K_{0,y})(xi)`` with ``L`` from the numeric Fourier integral of ``K``.

    Equals ``conj(q_xi(y))``; for fibers of dimension ``d > 1`` a length-``d``
    vector equal to ``conj(Q_xi(y))``.
    """
    xi = _inside(model, xi)
    y = model.y_point(y)
    d = model.fiber_count(xi)
    if model.n > 1:
        out = 1.0 + 0j
        for coord, c, yc in split_coordinates(model, xi, y):
            out *= apply_R_to_kernel(coord, yc, c, spec)
        return out

    # in exact arithmetic the integrand is conj(q(y)) |q(w)|^2, so the basis
    # mass fixes the window; far out the Fourier integral of K cancels badly
    mass = lambda w: sum(abs(model.Q_closed(xi, k, w)) ** 2 for k in range(1, d + 1))
    cache = {}

    def L_num(w):
        hit = cache.get(w)
        if hit is None:
            # an error e in L at w moves the outer integral by about e |q(w)| rho(w)
            scale = np.sqrt(mass(w)) * float(model.y_measure.weight(w)) * _R_BUDGET
            local = spec if scale >= 1.0 else replace(spec, abs_tol=spec.abs_tol / max(scale, 1e-290))
            hit = cache[w] = compute_L_numeric(model, xi, y, w, local)
        return hit

    vals = []
    for j in range(1, d + 1):
        res = integrate(lambda w: L_num(w) * np.conj(model.Q_closed(xi, j, w)), model.y_measure, spec,
                        envelope=mass)
        vals.append(res.require("kernel transform integral"))
    return vals[0] if d == 1 else np.array(vals)


def _kernel_side(model, psi, xi, y, j, spec):
    """``int_Y psi(v) L_{xi,y}(v) conj(q_{j,xi}(v)) d(lambda)(v)`` per coordinate."""
    total = 1.0 + 0j
    for (coord, c, yc), p in zip(split_coordinates(model, xi, y), _coordinate_symbols(model, psi)):
        jj = j if coord is model else 1
        total *= _y_integral(coord, lambda v: coord.L_closed(c, yc, v) * np.conj(coord.Q_closed(c, jj, v)),
                             p, spec, "kernel-side integral")
    return total


def lambda_inverse_toeplitz(model: KernelModel, psi: SymbolSpec, xi, y_anchor,
                            spec: QuadSpec = DEFAULT_SPEC) -> complex:
    """``sigma(xi) = (R T_psi K_{0,y})(xi) / conj(q_xi(y))`` at the anchor ``y``.

    Raises
    ------
    AnchorDegenerate
        If ``|q_xi(y_anchor)| < 1e-8``.
    """
    xi = _inside(model, xi)
    model.symbol_on_y(psi)
    if model.fiber_count(xi) > 1:
        raise NonScalarFiber("use lambda_inverse_matrix for fibers of dimension above one")
    y = model.y_point(y_anchor, closure=True)
    qy = complex(model.Q_closed(xi, 1, y))
    if abs(qy) < ANCHOR_MIN:
        raise AnchorDegenerate(f"|q_xi(y)| = {abs(qy):.3g} at anchor y={y_anchor!r}")
    return _kernel_side(model, psi, xi, y, 1, spec) / np.conj(qy)


def default_anchors(model: KernelModel, d: int, seed: int = 0) -> list:
    """``d`` quantile points (20% to 80%) of the typical ``Y`` region;
    ``seed > 0`` gives a random redraw instead."""
    lo, hi = model.y_region
    if seed == 0:
        fr = np.linspace(0.2, 0.8, d) if d > 1 else np.array([0.5])
    else:
        fr = np.sort(np.random.default_rng(seed).uniform(0.05, 0.95, d))
    return [float(lo + (hi - lo) * f) for f in fr]


def _anchor_matrix(model, xi, anchors):
    A = np.column_stack([np.conj(eval_Q(model, xi, y)) for y in anchors])
    return A, np.linalg.cond(A)


def lambda_inverse_matrix(model: KernelModel, psi: SymbolSpec, xi, y_anchors: Optional[Sequence] = None,
                          spec: QuadSpec = DEFAULT_SPEC, redraws: int = 8) -> np.ndarray:
    """Solve ``sigma(xi) [conj Q(y_1) ... conj Q(y_d)] = [R T K_{0,y_1} ... R T K_{0,y_d}]``.

    Without explicit anchors, quantile points are tried first and then up
    to ``redraws`` seeded random draws.

    Raises
    ------
    SingularAnchorMatrix
        If the anchor matrix has condition number above 1e8.
    """
    xi = _inside(model, xi)
    model.symbol_on_y(psi)
    d = model.fiber_count(xi)
    if y_anchors is not None:
        anchors = [model.y_point(y, closure=True) for y in y_anchors]
        if len(anchors) != d:
            raise SingularAnchorMatrix(f"need exactly {d} anchors, got {len(anchors)}")
        A, cond = _anchor_matrix(model, xi, anchors)
    else:
        for seed in range(redraws + 1):
            anchors = default_anchors(model, d, seed)
            A, cond = _anchor_matrix(model, xi, anchors)
            if cond <= ANCHOR_COND_MAX:
                break
    if not cond <= ANCHOR_COND_MAX:
        raise SingularAnchorMatrix(f"anchor matrix condition number {cond:.3g} exceeds {ANCHOR_COND_MAX:g}")
    B = np.empty((d, d), dtype=complex)
    for i, y in enumerate(anchors):
        for j in range(1, d + 1):
            B[j - 1, i] = _kernel_side(model, psi, xi, y, j, spec)
    return np.linalg.solve(A.T, B.T).T


def _omega_points(model):
    """Breakpoints of the frequency integrand (the edge of ``Omega``)."""
    return (0.0,)


def _dual_integral(model, f, spec, what):
    m = model.group.dual_measure()
    pts = () if model.group.dual_is_integer else _omega_points(model)
    return integrate(f, m, spec, pts).require(what)


def kernel_diagonal_from_fibers(model: KernelModel, y, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``int_Omega |Q_xi(y)|^2 d(nu-hat)(xi)``, which equals ``K_{0,y}(0, y)``."""
    y = model.y_point(y)
    total = 1.0
    for coord, yc in split_coordinates(model, y):
        def f(xi, coord=coord, yc=yc):
            d = coord.dim_at(xi)
            return sum(abs(coord.Q_closed(xi, j, yc)) ** 2 for j in range(1, d + 1))
        total *= _dual_integral(coord, f, spec, "Parseval integral").real
    return total


def _berezin_1d(coord, psi, y, spec):
    memo = {}

    def weight(xi):
        d = coord.dim_at(xi)
        if d == 0:
            return 0.0, None
        w = np.conj(np.array([coord.Q_closed(xi, j, y) for j in range(1, d + 1)]))
        return float(np.vdot(w, w).real), w

    def numerator(xi):
        mass, w = weight(xi)
        if mass == 0.0:
            return 0.0
        g = memo.get(xi)
        if g is None:
            g = memo[xi] = (np.atleast_2d(gamma_matrix(coord, psi, xi, spec)))
        return complex(np.vdot(w, g @ w))

    den = _dual_integral(coord, lambda xi: weight(xi)[0], spec, "Berezin denominator")
    if abs(den) < UNDERFLOW:
        raise DenominatorUnderflow(f"kernel diagonal {den:.3g} at y={y!r}")
    num = _dual_integral(coord, numerator, spec, "Berezin numerator")
    return num, den.real


def berezin(model: KernelModel, psi: SymbolSpec, y, spec: QuadSpec = DEFAULT_SPEC) -> complex:
    """Berezin transform of the invariant Toeplitz operator with symbol ``psi`` at height ``y``.

    ``int_Omega w^H gamma(xi) w d(nu-hat) / int_Omega |w|^2 d(nu-hat)`` with
    ``w = conj(Q_xi(y))``; in the scalar case the weight is ``L_{xi,y}(y)``.
    The ``G`` coordinate drops out.

    Raises
    ------
    DenominatorUnderflow
        If the kernel diagonal is below 1e-30.
    """
    y = model.y_point(y)
    model.symbol_on_y(psi)
    ratio = 1.0 + 0j
    for (coord, yc), p in zip(split_coordinates(model, y), _coordinate_symbols(model, psi)):
        num, den = _berezin_1d(coord, p, yc, spec)
        ratio *= num / den
    return ratio


def berezin_denominator(model: KernelModel, y, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Denominator of :func:`berezin`; should equal ``eval_K(model, 0, y, 0, y)``."""
    return kernel_diagonal_from_fibers(model, y, spec)


def spectrum_range(model: KernelModel, psi: SymbolSpec, xi_grid: Optional[Sequence] = None,
                   spec: QuadSpec = DEFAULT_SPEC) -> SpectrumRange:
    """Min and max of ``gamma`` (eigenvalues when ``d > 1``) over the grid points in ``Omega``.

    This is an inner estimate of the essential range of the spectral function.
    """
    if not psi.is_real:
        raise ValueError("spectrum_range needs a real-valued symbol")
    if xi_grid is None:
        xi_grid = default_xi_grid(model)
    vals = []
    used = []
    for xi in xi_grid:
        xi = model.frequency(xi)
        if not model.omega_contains(xi):
            continue
        used.append(xi)
        g = gamma_matrix(model, psi, xi, spec)
        vals.extend(np.linalg.eigvalsh(0.5 * (g + g.conj().T)).tolist())
    if not vals:
        raise FrequencyOutsideOmega("no grid frequency lies in Omega")
    return SpectrumRange(min(vals), max(vals), max(abs(v) for v in vals), tuple(used))
