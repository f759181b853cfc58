"""Closed-form continuum computations for exponential/coherent vectors.

Step functions carry exact rational breakpoints, so every overlap length is
computed exactly and floating point enters only through the final
exponentials and the complex values themselves.  Inner products are
conjugate-linear in the first argument.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .linalg import InvalidInputError


class HorizonMismatchError(InvalidInputError):
    """Step functions live on different horizons or dimensions."""


class GridError(ValueError):
    """A breakpoint does not lie on the requested dyadic grid."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _vec(v, dim: int) -> np.ndarray:
    a = np.asarray(v, dtype=complex).reshape(-1)
    if a.size != dim:
        raise InvalidInputError(f"expected a vector of dimension {dim}")
    return a


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function [0, T) -> C^d with rational breakpoints.

    ``pieces`` is a sorted tuple of (lo, hi, value) with disjoint half-open
    intervals [lo, hi); gaps take the value zero.
    """

    dimension: int
    pieces: tuple
    horizon: Fraction

    @classmethod
    def from_pieces(cls, dimension: int, pieces: Iterable, horizon) -> "StepFunction":
        horizon = _frac(horizon)
        if horizon <= 0:
            raise InvalidInputError("horizon must be positive")
        cleaned = []
        for lo, hi, value in pieces:
            lo, hi = _frac(lo), _frac(hi)
            if not 0 <= lo <= hi <= horizon:
                raise InvalidInputError(f"piece [{lo},{hi}) outside [0,{horizon})")
            if lo == hi:
                continue
            cleaned.append((lo, hi, _vec(value, dimension)))
        cleaned.sort(key=lambda p: p[0])
        for (_, hi1, _), (lo2, _, _) in zip(cleaned, cleaned[1:]):
            if hi1 > lo2:
                raise InvalidInputError("pieces overlap")
        return cls(dimension, tuple(cleaned), horizon)

    @classmethod
    def constant(cls, value, horizon) -> "StepFunction":
        v = np.asarray(value, dtype=complex).reshape(-1)
        return cls.from_pieces(v.size, [(0, _frac(horizon), v)], horizon)

    @classmethod
    def zero(cls, dimension: int, horizon) -> "StepFunction":
        return cls.from_pieces(dimension, [], horizon)

    def value_at(self, s) -> np.ndarray:
        s = _frac(s)
        for lo, hi, value in self.pieces:
            if lo <= s < hi:
                return value
        return np.zeros(self.dimension, dtype=complex)

    def breakpoints(self) -> list[Fraction]:
        pts = {Fraction(0), self.horizon}
        for lo, hi, _ in self.pieces:
            pts.update((lo, hi))
        return sorted(pts)

    def segments(self) -> list[tuple]:
        """Full partition of [0, T) into (lo, hi, value), gaps included."""
        out = []
        cursor = Fraction(0)
        for lo, hi, value in self.pieces:
            if cursor < lo:
                out.append((cursor, lo, np.zeros(self.dimension, dtype=complex)))
            out.append((lo, hi, value))
            cursor = hi
        if cursor < self.horizon:
            out.append((cursor, self.horizon, np.zeros(self.dimension, dtype=complex)))
        return out

    def window(self, lo, hi) -> "StepFunction":
        """Restriction that vanishes outside [lo, hi), on the same horizon."""
        lo, hi = _frac(lo), _frac(hi)
        clipped = []
        for a, b, value in self.pieces:
            a2, b2 = max(a, lo), min(b, hi)
            if a2 < b2:
                clipped.append((a2, b2, value))
        return StepFunction.from_pieces(self.dimension, clipped, self.horizon)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        if not isinstance(other, StepFunction):
            return NotImplemented
        if self.dimension != other.dimension or self.horizon != other.horizon:
            raise HorizonMismatchError("cannot add step functions on different domains")
        cuts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        pieces = []
        for lo, hi in zip(cuts, cuts[1:]):
            value = self.value_at(lo) + other.value_at(lo)
            if np.any(value != 0):
                pieces.append((lo, hi, value))
        return StepFunction.from_pieces(self.dimension, pieces, self.horizon)


@dataclass(frozen=True)
class UnitLabel:
    """Drift scalar and direction vector labelling an exponential unit."""

    drift: complex
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "drift", complex(self.drift))
        object.__setattr__(self, "direction",
                           np.asarray(self.direction, dtype=complex).reshape(-1))


def _check_compatible(f: StepFunction, g: StepFunction):
    if f.horizon != g.horizon or f.dimension != g.dimension:
        raise HorizonMismatchError("step functions must share horizon and dimension")


def _l2_inner(f: StepFunction, g: StepFunction) -> complex:
    """Exact-overlap L2 inner product, conjugate-linear in f."""
    _check_compatible(f, g)
    total = 0.0 + 0.0j
    for lo1, hi1, c in f.pieces:
        for lo2, hi2, d in g.pieces:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo < hi:
                total += float(hi - lo) * complex(np.vdot(c, d))
    return total


def exp_inner(f: StepFunction, g: StepFunction) -> complex:
    """Inner product of the exponential vectors of two step functions."""
    return cmath.exp(_l2_inner(f, g))


def root_inner(c, d2, t) -> complex:
    """Inner product, at time t, of the rooted sections with directions c, d2."""
    if t <= 0:
        raise ValueError("time must be positive")
    c = np.asarray(c, dtype=complex).reshape(-1)
    d2 = np.asarray(d2, dtype=complex).reshape(-1)
    return float(t) * complex(np.vdot(c, d2))


@dataclass(frozen=True)
class EulerProduct:
    product_value: complex
    limit_value: complex
    gap: float


def euler_product(g: StepFunction, c, t, n: int) -> EulerProduct:
    """Discrete exponential product against the coherent direction c.

    Splits [0, t) into 2^n equal cells; each constant segment of g with
    value d covering k cells contributes (1 + 2^-n t <d, c>)^k, which
    converges to exp((segment length) <d, c>) as n grows.  Breakpoints of g
    must lie on the dyadic grid.
    """
    t = _frac(t)
    if t != g.horizon:
        raise HorizonMismatchError("horizon of g must equal t")
    c = _vec(c, g.dimension)
    cell = t / 2 ** n
    product = 1.0 + 0.0j
    limit = 1.0 + 0.0j
    for lo, hi, d in g.segments():
        cells = (hi - lo) / cell
        if cells.denominator != 1:
            raise GridError(f"breakpoint pair ({lo},{hi}) is off the 2^-{n} grid")
        ip = complex(np.vdot(d, c))
        product *= (1.0 + float(cell) * ip) ** int(cells)
        limit *= cmath.exp(float(hi - lo) * ip)
    return EulerProduct(product, limit, abs(product - limit))


def euler_norm_defect(c, t, n: int) -> float:
    """Squared distance between the 2^n-fold discrete unit power and its limit.

    Equals exp(t |c|^2) - (1 + 2^-n t |c|^2)^(2^n); nonnegative and
    decreasing in n.
    """
    if t <= 0:
        raise ValueError("time must be positive")
    c = np.asarray(c, dtype=complex).reshape(-1)
    u = float(t) * float(np.vdot(c, c).real)
    return math.exp(u) - (1.0 + u / 2 ** n) ** (2 ** n)


def guichardet_eval(g: StepFunction, sigma: Sequence) -> np.ndarray:
    """Point evaluation tensor g(s_1) (x) ... (x) g(s_k).

    The empty point set yields the scalar 1 (as a length-1 array), matching
    the zero-fold tensor power convention.
    """
    points = sorted(_frac(s) for s in sigma)
    for s in points:
        if not 0 <= s < g.horizon:
            raise ValueError(f"point {s} outside the horizon [0,{g.horizon})")
    out = np.ones(1, dtype=complex)
    for s in points:
        out = np.kron(out, g.value_at(s))
    return out


def weyl_on_coherent(h: StepFunction, k2: StepFunction) -> tuple[complex, StepFunction]:
    """Action of the Weyl displacement by h on the coherent label k2.

    Returns the unimodular phase exp(-i Im<h, k2>) and the shifted label
    h + k2.
    """
    _check_compatible(h, k2)
    phase = cmath.exp(-1j * _l2_inner(h, k2).imag)
    return phase, h + k2


def index_from_units(units: Sequence[UnitLabel]) -> int:
    """Dimension of the index space determined by a family of unit labels.

    Builds the covariance form conj(lam_u) + lam_v + <c_u, c_v> on
    zero-sum coefficient vectors and returns its rank, which equals the
    rank of the span of the pairwise direction differences.
    """
    if not units:
        raise InvalidInputError("at least one unit is required")
    m = len(units)
    if m == 1:
        return 0
    dims = {u.direction.size for u in units}
    if len(dims) != 1:
        raise InvalidInputError("unit directions must share a dimension")
    gamma = np.empty((m, m), dtype=complex)
    for i, ui in enumerate(units):
        for j, uj in enumerate(units):
            gamma[i, j] = np.conj(ui.drift) + uj.drift + np.vdot(ui.direction, uj.direction)
    # zero-sum coordinates: f_k = e_k - e_{k+1}
    zs = np.zeros((m, m - 1), dtype=complex)
    for k in range(m - 1):
        zs[k, k] = 1.0
        zs[k + 1, k] = -1.0
    gram = zs.conj().T @ gamma @ zs
    eigs = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
    top = max(abs(eigs.max()), abs(eigs.min()))
    if top == 0.0:
        return 0
    return int(np.sum(eigs > 1e-10 * top))
