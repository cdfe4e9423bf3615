"""Bounded generating symbols ``psi: Y -> C`` for invariant Toeplitz operators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParam

_FAMILIES = ("const", "indicator", "expdecay", "power", "callback")
_ARITY = {"const": 1, "indicator": 2, "expdecay": 1, "power": 1}


@dataclass(frozen=True)
class SymbolSpec:
    """A symbol from one of the builtin families, or a user callback.

    Builtins act on the first coordinate of a vector-valued ``Y`` point.

    Examples
    --------
    >>> SymbolSpec.parse("indicator:0,1")(0.5)
    1.0
    """

    family: str
    params: tuple = ()
    callback: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise InvalidParam(f"unknown symbol family {self.family!r}")
        if self.family == "callback":
            if not callable(self.callback):
                raise InvalidParam("callback symbols need a callable")
            return
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if len(params) != _ARITY[self.family]:
            raise InvalidParam(f"{self.family} takes {_ARITY[self.family]} parameter(s), got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise InvalidParam("symbol parameters must be finite")
        if self.family == "indicator" and not params[0] < params[1]:
            raise InvalidParam("indicator:a,b needs a < b")

    @classmethod
    def const(cls, c: float) -> "SymbolSpec":
        return cls("const", (c,))

    @classmethod
    def indicator(cls, a: float, b: float) -> "SymbolSpec":
        return cls("indicator", (a, b))

    @classmethod
    def expdecay(cls, alpha: float) -> "SymbolSpec":
        return cls("expdecay", (alpha,))

    @classmethod
    def power(cls, p: float) -> "SymbolSpec":
        return cls("power", (p,))

    @classmethod
    def from_callable(cls, fn: Callable) -> "SymbolSpec":
        return cls("callback", (), fn)

    @classmethod
    def parse(cls, text: str) -> "SymbolSpec":
        """Parse ``const:c``, ``indicator:a,b``, ``expdecay:alpha`` or ``power:p``."""
        family, sep, rest = text.strip().partition(":")
        if not sep or family not in _ARITY:
            raise InvalidParam(f"cannot parse symbol {text!r}")
        try:
            params = tuple(float(tok) for tok in rest.split(","))
        except ValueError:
            raise InvalidParam(f"cannot parse symbol parameters in {text!r}") from None
        return cls(family, params)

    def __str__(self) -> str:
        if self.family == "callback":
            return "callback"
        return f"{self.family}:" + ",".join(repr(p) for p in self.params)

    @property
    def is_real(self) -> bool:
        return self.family != "callback"

    def breakpoints(self) -> tuple:
        return self.params if self.family == "indicator" else ()

    def __call__(self, v):
        if np.ndim(v) > 0 and self.family != "callback":
            v = v[0] if np.ndim(v) == 1 else v
        fam, p = self.family, self.params
        if fam == "const":
            return p[0]
        if fam == "indicator":
            return 1.0 if p[0] < v < p[1] else 0.0
        if fam == "expdecay":
            return math.exp(-p[0] * v)
        if fam == "power":
            return 0.0 if v == 0.0 and p[0] > 0 else v ** p[0]
        return self.callback(v)

    def bounds(self, lo: float, hi: float) -> tuple[float, float]:
        """Range of a real builtin over the interval ``(lo, hi)`` of its argument."""
        fam, p = self.family, self.params
        if fam == "const":
            return p[0], p[0]
        if fam == "indicator":
            inside = p[0] < hi and p[1] > lo
            outside = lo < p[0] or hi > p[1]
            return (0.0 if outside else 1.0), (1.0 if inside else 0.0)
        if fam == "expdecay":
            ends = [math.exp(-p[0] * x) if math.isfinite(x) else (0.0 if p[0] * x > 0 else math.inf)
                    for x in (lo, hi)]
            return min(ends), max(ends)
        if fam == "power":
            ends = [(x ** p[0] if x > 0 else (0.0 if p[0] > 0 else math.inf)) if math.isfinite(x)
                    else (math.inf if p[0] > 0 else 0.0) for x in (lo, hi)]
            if p[0] == 0:
                return 1.0, 1.0
            return min(ends), max(ends)
        raise InvalidParam("callback symbols carry no bounds")

    def check_bounded(self, lo: float, hi: float) -> None:
        """Raise :class:`InvalidParam` if a builtin is unbounded on ``(lo, hi)``."""
        fam = self.family
        if fam in ("callback", "const", "indicator"):
            return
        p = self.params[0]
        if fam == "expdecay":
            ok = p == 0 or (p > 0 and math.isfinite(lo)) or (p < 0 and math.isfinite(hi))
        elif p == 0:
            ok = True
        elif p < 0:
            ok = lo > 0
        else:
            ok = math.isfinite(hi) and (lo >= 0 or (math.isfinite(lo) and p == int(p)))
        if not ok:
            raise InvalidParam(f"symbol {self} is unbounded or not real on ({lo}, {hi})")
