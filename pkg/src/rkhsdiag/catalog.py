"""
Catalog of translation-invariant reproducing kernels over ``G x Y``.

Each :class:`KernelModel` bundles the group conventions (pairing and Haar
measures), the measure ``lambda`` on ``Y``, the kernel ``K_{0,y}(u, v)``,
the closed-form fiber kernel ``L_{xi,y}(v)``, an orthonormal basis of each
fiber, and, where one is known, the closed form of the Toeplitz spectral
function.

Model ids carry parameters after a colon, e.g. ``vertical-poly:n=3`` or
``gaussian-rbf:n=2,alpha=0.5``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate as _sp_integrate

from . import specialfns
from .errors import (
    DomainViolation,
    FrequencyOutsideOmega,
    IndexOutOfRange,
    InvalidParam,
    UnknownModel,
)
from .quadrature import TWO_PI, Domain1D, WeightedMeasure
from .symbols import SymbolSpec

SQRT_2PI = math.sqrt(TWO_PI)
_C_VERT = math.sqrt(2.0 / math.pi)          # sqrt(2/pi)
_C_VERT_Q = (2.0 / math.pi) ** 0.25


# ---------------------------------------------------------------- groups

@dataclass(frozen=True)
class GroupModel:
    """Group ``G`` (``R^n`` or the circle) with its pairing and Haar measures.

    ``kind`` is ``"real-exp"`` (pairing ``exp(i x xi)``, ``nu = dx/sqrt(2 pi)``),
    ``"real-2pi"`` (pairing ``exp(2 pi i x xi)``, ``nu = dx``) or ``"circle"``
    (normalized Haar measure, dual group ``Z`` with counting measure).
    """

    kind: str
    dimension: int = 1

    def __post_init__(self):
        if self.kind not in ("real-exp", "real-2pi", "circle"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.dimension < 1 or (self.kind == "circle" and self.dimension != 1):
            raise ValueError("invalid group dimension")

    @property
    def freq_scale(self) -> float:
        return TWO_PI if self.kind == "real-2pi" else 1.0

    @property
    def dual_is_integer(self) -> bool:
        return self.kind == "circle"

    def haar_measure(self) -> WeightedMeasure:
        if self.kind == "circle":
            return WeightedMeasure(Domain1D.circle())
        scale = 1.0 / SQRT_2PI if self.kind == "real-exp" else 1.0
        return WeightedMeasure(Domain1D.line(), scale=scale)

    def dual_measure(self) -> WeightedMeasure:
        if self.kind == "circle":
            return WeightedMeasure(Domain1D.integers())
        return self.haar_measure()

    def pairing(self, x, xi) -> complex:
        """``E(x, xi)``; products over coordinates in dimension ``n``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        return complex(np.exp(1j * self.freq_scale * float(np.dot(x, xi))))

    def canonical(self, x):
        if self.kind == "circle":
            return float(np.mod(x, TWO_PI))
        return x

    def subtract(self, u, x):
        if self.kind == "circle":
            return float(np.mod(float(u) - float(x), TWO_PI))
        if self.dimension == 1:
            return float(u) - float(x)
        return tuple(float(a) - float(b) for a, b in zip(u, x))


# ----------------------------------------------------------------- models

@dataclass(frozen=True, eq=False)
class KernelModel:
    """One catalog entry.

    ``K0(u, v, y)`` evaluates ``K_{0,y}(u, v)`` and may be fed numpy arrays
    in ``u``. ``L_closed``, ``Q_closed`` and ``dim_at`` are only called for
    frequencies inside ``Omega``; use :func:`eval_L` and :func:`eval_q` for
    the checked entry points. For ``n > 1`` the model factorizes over
    coordinates and ``coordinate_model`` is the one-dimensional factor.
    """

    id: str
    family: str
    params: dict
    group: GroupModel
    y_measure: WeightedMeasure
    dim_at: Callable[[object], int]
    K0: Callable
    L_closed: Callable
    Q_closed: Callable
    gamma_closed: Optional[Callable] = None
    y_region: tuple = (0.2, 3.0)
    y_bounds: tuple = (0.0, math.inf)
    y_closed_low: bool = False
    coordinate_model: Optional["KernelModel"] = None
    description: str = ""

    @property
    def n(self) -> int:
        return self.group.dimension

    @property
    def max_fiber_dimension(self) -> int:
        return int(self.params.get("n", 1)) if self.family == "vertical-poly" else 1

    def fiber_count(self, xi) -> int:
        return int(self.dim_at(self.frequency(xi)))

    def omega_contains(self, xi) -> bool:
        return self.fiber_count(xi) > 0

    def frequency(self, xi):
        """Validate and normalize a frequency (a float, an int on ``Z``, a tuple in ``R^n``)."""
        if self.n > 1:
            xi = tuple(float(c) for c in np.ravel(xi))
            if len(xi) != self.n or not all(math.isfinite(c) for c in xi):
                raise DomainViolation(f"frequency must have {self.n} finite components")
            return xi
        if np.ndim(xi) > 0:
            flat = np.ravel(xi)
            if flat.size != 1:
                raise DomainViolation("one-dimensional model takes a scalar frequency")
            xi = flat[0]
        if self.group.dual_is_integer:
            if float(xi) != math.floor(float(xi)):
                raise DomainViolation(f"frequencies of {self.id} are integers, got {xi!r}")
            return int(xi)
        xi = float(xi)
        if not math.isfinite(xi):
            raise DomainViolation("frequency must be finite")
        return xi

    def y_point(self, y, closure: bool = False):
        """Validate a ``Y`` point and return it as float or tuple.

        ``closure=True`` also admits the finite lower endpoint, where the
        closed forms of ``L`` and ``q`` extend continuously.
        """
        lo, hi = self.y_bounds
        if self.n > 1:
            y = tuple(float(c) for c in np.ravel(y))
            if len(y) != self.n:
                raise DomainViolation(f"Y points of {self.id} have {self.n} components")
            for c in y:
                self._check_y(c, lo, hi, closure)
            return y
        y = float(y)
        self._check_y(y, lo, hi, closure)
        return y

    def _check_y(self, c, lo, hi, closure=False):
        low_ok = c >= lo if (self.y_closed_low or closure) else c > lo
        if not (math.isfinite(c) and low_ok and c < hi):
            raise DomainViolation(f"{c!r} is outside Y of {self.id}")

    def g_point(self, x):
        if self.n > 1:
            x = tuple(float(c) for c in np.ravel(x))
            if len(x) != self.n or not all(math.isfinite(c) for c in x):
                raise DomainViolation(f"G points of {self.id} have {self.n} finite components")
            return x
        x = float(x)
        if not math.isfinite(x):
            raise DomainViolation("G point must be finite")
        return self.group.canonical(x)

    def symbol_on_y(self, psi: SymbolSpec) -> SymbolSpec:
        """Check that a builtin symbol is bounded on ``Y`` (first coordinate)."""
        psi.check_bounded(*self.y_bounds)
        return psi

    def __repr__(self):
        return f"KernelModel({self.id!r})"


# --------------------------------------------------------------- evaluation

def eval_K(model: KernelModel, x, y, u, v) -> complex:
    """``K_{x,y}(u, v) = K_{0,y}(u - x, v)`` with the group subtraction of the model."""
    x, u = model.g_point(x), model.g_point(u)
    y, v = model.y_point(y), model.y_point(v)
    return complex(model.K0(model.group.subtract(u, x), v, y))


def eval_L(model: KernelModel, xi, y, v) -> complex:
    """Closed-form fiber kernel ``L_{xi,y}(v)``; zero outside ``Omega``."""
    xi = model.frequency(xi)
    y, v = model.y_point(y, True), model.y_point(v, True)
    if not model.omega_contains(xi):
        return 0j
    return complex(model.L_closed(xi, y, v))


def eval_q(model: KernelModel, xi, j: int, v) -> complex:
    """``j``-th (1-based) orthonormal basis function of the fiber at ``xi``."""
    xi = model.frequency(xi)
    v = model.y_point(v, True)
    d = model.fiber_count(xi)
    if d == 0:
        raise FrequencyOutsideOmega(f"xi={xi!r} is outside Omega of {model.id}")
    if not (isinstance(j, (int, np.integer)) and 1 <= j <= d):
        raise IndexOutOfRange(f"basis index {j!r} outside 1..{d}")
    return complex(model.Q_closed(xi, int(j), v))


def eval_Q(model: KernelModel, xi, v) -> np.ndarray:
    """Vector ``(q_{1,xi}(v), ..., q_{d,xi}(v))``."""
    xi = model.frequency(xi)
    d = model.fiber_count(xi)
    if d == 0:
        raise FrequencyOutsideOmega(f"xi={xi!r} is outside Omega of {model.id}")
    v = model.y_point(v, True)
    return np.array([complex(model.Q_closed(xi, j, v)) for j in range(1, d + 1)])


# ------------------------------------------------- printed spectral formulas

def _piecewise_quad(f, a, b, points=()):
    """Plain scipy integral of ``f`` over ``(a, b)``, split at ``points``."""
    cuts = [a] + sorted(p for p in set(points) if a < p < b) + [b]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        val, _ = _sp_integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=400)
        total += val
    return total


def _real_part(psi):
    return lambda v: complex(psi(v)).real


def _imag_part(psi):
    return lambda v: complex(psi(v)).imag


def _printed(weight, a, b, extra_points=()):
    """Spectral function ``int psi(v) weight(xi, v) dv`` over ``(a, b)``."""
    def gamma(psi: SymbolSpec, xi):
        pts = tuple(psi.breakpoints()) + tuple(extra_points)
        re = _piecewise_quad(lambda v: _real_part(psi)(v) * weight(xi, v), a, b, pts)
        im = 0.0
        if not psi.is_real:
            im = _piecewise_quad(lambda v: _imag_part(psi)(v) * weight(xi, v), a, b, pts)
        return complex(re, im)
    return gamma


def _printed_radial(absolute: bool):
    # (|xi| + 1) int_0^1 psi(sqrt r) r^|xi| dr
    def gamma(psi: SymbolSpec, xi):
        k = abs(xi) if absolute else xi
        pts = tuple(p * p for p in psi.breakpoints() if p > 0)
        re = _piecewise_quad(lambda r: _real_part(psi)(math.sqrt(r)) * r ** k, 0.0, 1.0, pts)
        im = 0.0
        if not psi.is_real:
            im = _piecewise_quad(lambda r: _imag_part(psi)(math.sqrt(r)) * r ** k, 0.0, 1.0, pts)
        return (k + 1) * complex(re, im)
    return gamma


# ------------------------------------------------------------ constructors

def _vertical_measure():
    return WeightedMeasure(Domain1D.half_line(0.0), scale=SQRT_2PI)


def _bergman_half_plane(u, s):
    return -1.0 / (math.pi * (u + 1j * s) ** 2)


def _vertical_analytic(params):
    def K0(u, v, y):
        return _bergman_half_plane(u, v + y)

    def L(xi, y, v):
        return _C_VERT * xi * math.exp(-xi * (y + v))

    def Q(xi, j, v):
        return _C_VERT_Q * math.sqrt(xi) * math.exp(-xi * v)

    return dict(
        group=GroupModel("real-exp"),
        y_measure=_vertical_measure(),
        dim_at=lambda xi: 1 if xi > 0 else 0,
        K0=K0, L_closed=L, Q_closed=Q,
        gamma_closed=_printed(lambda xi, v: 2 * xi * math.exp(-2 * xi * v), 0.0, math.inf),
        description="analytic Bergman space on the upper half-plane, horizontal translations",
    )


def _vertical_harmonic(params):
    def K0(u, v, y):
        s = v + y
        return _bergman_half_plane(u, s) - 1.0 / (math.pi * (u - 1j * s) ** 2)

    def L(xi, y, v):
        a = abs(xi)
        return _C_VERT * a * math.exp(-a * (y + v))

    def Q(xi, j, v):
        a = abs(xi)
        return _C_VERT_Q * math.sqrt(a) * math.exp(-a * v)

    return dict(
        group=GroupModel("real-exp"),
        y_measure=_vertical_measure(),
        dim_at=lambda xi: 1 if xi != 0 else 0,
        K0=K0, L_closed=L, Q_closed=Q,
        gamma_closed=_printed(lambda xi, v: 2 * abs(xi) * math.exp(-2 * abs(xi) * v), 0.0, math.inf),
        description="harmonic Bergman space on the upper half-plane, horizontal translations",
    )


@lru_cache(maxsize=None)
def _true_poly_coefficients(m):
    """Coefficients of the double sum in the true-polyanalytic kernel."""
    r = m - 1
    c = np.zeros((m, m))
    for j in range(m):
        for k in range(m):
            c[j, k] = ((-1) ** (j + k) * math.comb(r, j) * math.comb(r, k)
                       * math.factorial(j + k + 1) / (math.factorial(j) * math.factorial(k)))
    return c


def _true_poly_K0(m):
    coef = _true_poly_coefficients(m)

    def K0(u, v, y):
        # z = i y, w = u + i v
        a = u + 1j * (v + y)          # w - conj(z)
        p = 2j * v / a                # (w - conj w) / (w - conj z)
        q = 2j * y / a                # (z - conj z) / (w - conj z)
        total = 0j * a
        pj = 1.0 + 0j * a
        for j in range(m):
            qk = 1.0 + 0j * a
            for k in range(m):
                total = total + coef[j, k] * pj * qk
                qk = qk * q
            pj = pj * p
        return -total / (math.pi * a * a)

    return K0


def _vertical_true_poly(params):
    m = params["m"]
    r = m - 1

    def L(xi, y, v):
        return (_C_VERT * xi * math.exp(-xi * (y + v))
                * specialfns.laguerre(r, 2 * xi * y) * specialfns.laguerre(r, 2 * xi * v))

    def Q(xi, j, v):
        return _C_VERT_Q * math.sqrt(xi) * math.exp(-xi * v) * specialfns.laguerre(r, 2 * xi * v)

    def weight(xi, v):
        return 2 * xi * math.exp(-2 * xi * v) * specialfns.laguerre(r, 2 * xi * v) ** 2

    return dict(
        group=GroupModel("real-exp"),
        y_measure=_vertical_measure(),
        dim_at=lambda xi: 1 if xi > 0 else 0,
        K0=_true_poly_K0(m), L_closed=L, Q_closed=Q,
        gamma_closed=_printed(weight, 0.0, math.inf),
        description=f"true-polyanalytic Bergman space of order {m} on the upper half-plane",
    )


def _vertical_poly(params):
    n = params["n"]

    def K0(u, v, y):
        # z = i y, w = u + i v
        a = u + 1j * (v + y)              # w - conj(z)
        b = -u + 1j * (y + v)             # z - conj(w)
        d2 = u * u + (v - y) ** 2         # |w - z|^2
        e2 = u * u + (v + y) ** 2         # |w - conj z|^2
        jac = specialfns.jacobi01(n - 1, 2.0 * d2 / e2 - 1.0)
        return n * (-1) ** n / math.pi * b ** (n - 1) / a ** (n + 1) * jac

    def L(xi, y, v):
        tot = sum(specialfns.laguerre(k, 2 * xi * y) * specialfns.laguerre(k, 2 * xi * v) for k in range(n))
        return _C_VERT * xi * math.exp(-xi * (y + v)) * tot

    def Q(xi, j, v):
        return _C_VERT_Q * math.sqrt(xi) * math.exp(-xi * v) * specialfns.laguerre(j - 1, 2 * xi * v)

    return dict(
        group=GroupModel("real-exp"),
        y_measure=_vertical_measure(),
        dim_at=lambda xi: n if xi > 0 else 0,
        K0=K0, L_closed=L, Q_closed=Q,
        gamma_closed=None,
        description=f"polyanalytic Bergman space of order {n} on the upper half-plane",
    )


def _wavelet_affine(params):
    hat = specialfns.mexican_hat()
    c2 = hat.normalization ** 2
    fpsi = hat.freq_profile
    pref = c2 * TWO_PI * TWO_PI ** 4

    def K0(u, v, y):
        # <psi_{u,v}, psi_{0,y}> in closed form through the Fourier side
        a = 2 * math.pi ** 2 * (v * v + y * y)
        b = 1.0 / (2 * a)
        beta = TWO_PI * u
        b2 = beta * beta
        poly = 3 * b * b - 6 * b ** 3 * b2 + b ** 4 * b2 * b2
        return (np.sqrt(y * v) * pref * (v * y) ** 2 * np.sqrt(math.pi / a)
                * poly * np.exp(-0.5 * b * b2)) + 0j

    def L(xi, y, v):
        return math.sqrt(y * v) * fpsi(y * xi) * fpsi(v * xi)

    def Q(xi, j, v):
        return math.sqrt(v) * fpsi(v * xi)

    def weight(xi, v):
        return abs(fpsi(v * xi)) ** 2 / v

    return dict(
        group=GroupModel("real-2pi"),
        y_measure=WeightedMeasure(Domain1D.half_line(0.0), density=_inverse_square,
                                  log_substitution=True),
        dim_at=lambda xi: 1 if xi != 0 else 0,
        K0=K0, L_closed=L, Q_closed=Q,
        gamma_closed=_printed_log(weight),
        y_region=(0.2, 2.5),
        description="Mexican-hat wavelet space over the positive affine group",
    )


def _inverse_square(v):
    with np.errstate(over="ignore", divide="ignore"):
        return np.power(v, -2.0)


def _printed_log(weight):
    """Like :func:`_printed` on ``(0, inf)`` but through ``v = exp(t)``."""
    def integrand(part, xi):
        def f(t):
            # beyond |t| = 700 exp leaves the float range; the weight is negligible there
            if abs(t) > 700.0:
                return 0.0
            v = math.exp(t)
            return part(v) * weight(xi, v) * v
        return f

    def gamma(psi: SymbolSpec, xi):
        pts = [math.log(p) for p in psi.breakpoints() if p > 0]
        cuts = [-math.inf] + sorted(pts) + [math.inf]

        def total(part):
            f = integrand(part, xi)
            return sum(_sp_integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
                       for lo, hi in zip(cuts[:-1], cuts[1:]))

        im = total(_imag_part(psi)) if not psi.is_real else 0.0
        return complex(total(_real_part(psi)), im)
    return gamma


def _radial_measure():
    return WeightedMeasure(Domain1D.interval(0.0, 1.0), density=lambda v: v)


def _radial_analytic(params):
    def K0(u, v, y):
        return 2.0 / (1.0 - y * v * np.exp(1j * u)) ** 2

    def L(xi, y, v):
        return 2.0 * (xi + 1) * (y * v) ** xi

    def Q(xi, j, v):
        return math.sqrt(2.0 * (xi + 1)) * v ** xi

    return dict(
        group=GroupModel("circle"),
        y_measure=_radial_measure(),
        dim_at=lambda xi: 1 if xi >= 0 else 0,
        K0=K0, L_closed=L, Q_closed=Q,
        gamma_closed=_printed_radial(False),
        y_region=(0.05, 0.95), y_bounds=(0.0, 1.0), y_closed_low=True,
        description="analytic Bergman space on the unit disk, rotations",
    )


def _radial_harmonic(params):
    def K0(u, v, y):
        t = y * v
        return 2.0 / (1.0 - t * np.exp(1j * u)) ** 2 + 2.0 / (1.0 - t * np.exp(-1j * u)) ** 2 - 2.0

    def L(xi, y, v):
        a = abs(xi)
        return 2.0 * (a + 1) * (y * v) ** a

    def Q(xi, j, v):
        a = abs(xi)
        return math.sqrt(2.0 * (a + 1)) * v ** a

    return dict(
        group=GroupModel("circle"),
        y_measure=_radial_measure(),
        dim_at=lambda xi: 1,
        K0=K0, L_closed=L, Q_closed=Q,
        gamma_closed=_printed_radial(True),
        y_region=(0.05, 0.95), y_bounds=(0.0, 1.0), y_closed_low=True,
        description="harmonic Bergman space on the unit disk, rotations",
    )


def angular_constant(xi: float) -> float:
    """``2 xi / (1 - exp(-2 pi xi))``, continued by ``1/pi`` at zero."""
    if xi == 0:
        return 1.0 / math.pi
    return 2.0 * xi / -math.expm1(-TWO_PI * xi)


def _angular_scaled(xi, s):
    """``angular_constant(xi) * exp(-xi s)`` for ``0 <= s <= 2 pi`` without overflow."""
    if xi >= 0:
        return angular_constant(xi) * math.exp(-xi * s)
    a = -xi
    return 2.0 * a * math.exp(-a * (TWO_PI - s)) / -math.expm1(-TWO_PI * a)


def _angular_analytic(params):
    pref = -_C_VERT

    def K0(u, v, y):
        z = u + 1j * (v + y)
        z = np.where(np.real(z) >= 0, z, -z)
        e = np.exp(-z)
        val = pref * e / (1.0 - e) ** 2
        return val if np.ndim(val) else complex(val)

    def L(xi, y, v):
        return _angular_scaled(xi, y + v)

    def Q(xi, j, v):
        return math.sqrt(_angular_scaled(xi, 2 * v))

    return dict(
        group=GroupModel("real-exp"),
        y_measure=WeightedMeasure(Domain1D.interval(0.0, math.pi)),
        dim_at=lambda xi: 1,
        K0=K0, L_closed=L, Q_closed=Q,
        gamma_closed=_printed(lambda xi, v: angular_constant(xi) * math.exp(-2 * xi * v), 0.0, math.pi),
        y_region=(0.2, 2.9), y_bounds=(0.0, math.pi),
        description="analytic Bergman space on the upper half-plane, dilations",
    )


def _rbf_1d(alpha):
    a2 = alpha * alpha
    amp = math.sqrt(math.pi) / alpha
    k = math.pi ** 2 / a2

    def K0(u, v, y):
        return np.exp(-a2 * (u + 1j * (v + y)) ** 2)

    def L(xi, y, v):
        return amp * math.exp(-TWO_PI * (y + v) * xi - k * xi * xi)

    def Q(xi, j, v):
        return math.sqrt(amp) * math.exp(-TWO_PI * v * xi - 0.5 * k * xi * xi)

    measure = WeightedMeasure(Domain1D.line(), density=lambda v: np.exp(-4 * a2 * np.square(v)),
                              scale=2 * a2 / math.pi)
    return K0, L, Q, measure


def _gaussian_rbf(params):
    n, alpha = params["n"], params["alpha"]
    K0, L, Q, measure = _rbf_1d(alpha)
    base = dict(
        y_measure=measure,
        y_region=(-0.8, 0.8), y_bounds=(-math.inf, math.inf),
        gamma_closed=None,
        description=f"Gaussian (RBF) kernel space on C^{n}, real translations",
    )
    if n == 1:
        return dict(base, group=GroupModel("real-2pi"), dim_at=lambda xi: 1, K0=K0, L_closed=L, Q_closed=Q)

    coord = _build("gaussian-rbf", {"n": 1, "alpha": alpha})

    def K0n(u, v, y):
        out = 1.0 + 0j
        for uc, vc, yc in zip(u, v, y):
            out = out * K0(uc, vc, yc)
        return out

    def Ln(xi, y, v):
        return math.prod(L(a, b, c) for a, b, c in zip(xi, y, v))

    def Qn(xi, j, v):
        return math.prod(Q(a, 1, c) for a, c in zip(xi, v))

    return dict(base, group=GroupModel("real-2pi", n), dim_at=lambda xi: 1,
                K0=K0n, L_closed=Ln, Q_closed=Qn, coordinate_model=coord)


# ------------------------------------------------------------- registry

_PARAMS = {
    "vertical-analytic": {},
    "vertical-harmonic": {},
    "vertical-true-poly": {"m": 2},
    "vertical-poly": {"n": 2},
    "wavelet-affine": {},
    "radial-analytic": {},
    "radial-harmonic": {},
    "angular-analytic": {},
    "gaussian-rbf": {"n": 1, "alpha": 1.0},
}

_BUILDERS = {
    "vertical-analytic": _vertical_analytic,
    "vertical-harmonic": _vertical_harmonic,
    "vertical-true-poly": _vertical_true_poly,
    "vertical-poly": _vertical_poly,
    "wavelet-affine": _wavelet_affine,
    "radial-analytic": _radial_analytic,
    "radial-harmonic": _radial_harmonic,
    "angular-analytic": _angular_analytic,
    "gaussian-rbf": _gaussian_rbf,
}


def list_models() -> list[str]:
    """The nine model families, in catalog order."""
    return list(_PARAMS)


def parameter_schema(family: str) -> dict:
    if family not in _PARAMS:
        raise UnknownModel(family)
    return dict(_PARAMS[family])


def parse_model_id(text: str) -> tuple[str, dict]:
    """Split ``family:key=value,...`` into the family and a raw parameter dict."""
    family, sep, rest = text.strip().partition(":")
    if family not in _PARAMS:
        raise UnknownModel(f"unknown model {family!r}; known: {', '.join(_PARAMS)}")
    params = {}
    if sep and rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise InvalidParam(f"malformed parameter {item!r} in {text!r}")
            params[key.strip()] = val.strip()
    return family, params


def _coerce(family: str, raw: dict) -> dict:
    schema = _PARAMS[family]
    out = dict(schema)
    for key, val in raw.items():
        if key not in schema:
            raise InvalidParam(f"{family} has no parameter {key!r}")
        default = schema[key]
        try:
            if isinstance(default, int):
                fval = float(val)
                if fval != int(fval):
                    raise ValueError
                out[key] = int(fval)
            else:
                out[key] = float(val)
        except (TypeError, ValueError):
            raise InvalidParam(f"{family}: bad value {val!r} for {key}") from None
    for key in ("m", "n"):
        if key in out and out[key] < 1:
            raise InvalidParam(f"{family}: {key} must be >= 1")
    if family == "gaussian-rbf":
        if out["n"] not in (1, 2):
            raise InvalidParam("gaussian-rbf supports n in {1, 2}")
        if not (out["alpha"] > 0 and math.isfinite(out["alpha"])):
            raise InvalidParam("gaussian-rbf needs alpha > 0")
    return out


def _canonical_id(family, params):
    if not params:
        return family
    return family + ":" + ",".join(f"{k}={params[k]!r}" if isinstance(params[k], float)
                                   else f"{k}={params[k]}" for k in sorted(params))


@lru_cache(maxsize=64)
def _build_cached(family, items):
    params = dict(items)
    spec = _BUILDERS[family](params)
    return KernelModel(id=_canonical_id(family, params), family=family, params=params, **spec)


def _build(family, params):
    return _build_cached(family, tuple(sorted(params.items())))


def get_model(model_id: str, params: Optional[dict] = None, **kwargs) -> KernelModel:
    """Resolve a model id (optionally with ``:key=value`` parameters).

    Examples
    --------
    >>> get_model("vertical-poly", n=3).fiber_count(2.0)
    3
    """
    family, raw = parse_model_id(model_id)
    raw.update(params or {})
    raw.update(kwargs)
    return _build(family, _coerce(family, raw))
