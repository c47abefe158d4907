"""Asymptotic scaling laws and fitting utilities.

The closed-form coefficients of the large-L laws (per family and quantity)
live here, together with the least-squares helpers that compare exact scans
against them.  SU(N) coefficients are only known as brackets and are exposed
as brackets, never as point estimates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .commutants import Family
from .exactnum import DomainError, LogReal, tl_q

SQRT_8_OVER_PI = math.sqrt(8.0 / math.pi)


class Unsupported(ValueError):
    pass


class TooFewPoints(ValueError):
    pass


@dataclass(frozen=True)
class ScalingLaw:
    """value ~ coefficient * f(L) + offset, with f per `form`.

    kind records whether the law is an asymptotic equality or only a bound;
    coefficient_range carries the proven bracket where only a bracket is
    known (SU(N) with N > 2), and coefficient is then the lower edge (the
    one the finite-size data converges to).  A None coefficient means the
    form is known but the constant has no closed form here.
    """

    form: str  # const | log | sqrt | linear
    coefficient: float | None
    offset: float | None = None
    kind: str = "asymptote"  # asymptote | upper_bound | lower_bound
    coefficient_range: tuple[float, float] | None = None
    note: str = ""


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float
    window: tuple[float, float]


def tl_linear_coefficient(N: int, n: float) -> float:
    """Linear-growth coefficient of Rt_n for the TL(N) family (0 < n < 2).

    c~ = [-(1/2+2a)log(1/4+a) - (1/2-2a)log(1/4-a) + 2(2-n) a log q - 2 log 2]
         / (2-n),  at the stationary point a = (q^(2-n)-1)/(4(q^(2-n)+1)),
    with q + 1/q = N.  n = 1 gives the log-negativity volume-law constant
    (~0.1116 for N = 3).
    """
    if N < 3:
        raise DomainError(f"TL linear coefficient needs N >= 3 (q > 1), got N={N}")
    if not 0 < n < 2:
        raise DomainError(f"need 0 < n < 2, got n={n}")
    q = tl_q(N)
    return _tl_c_at(N, n, _tl_a_max(q, n)) / (2.0 - n)


def _tl_a_max(q: float, n: float) -> float:
    qq = q ** (2.0 - n)
    return 0.25 * (qq - 1.0) / (qq + 1.0)


def _tl_c_at(N: int, n: float, a: float) -> float:
    q = tl_q(N)
    return (
        -(0.5 + 2 * a) * math.log(0.25 + a)
        - (0.5 - 2 * a) * math.log(0.25 - a)
        + 2.0 * (2.0 - n) * a * math.log(q)
        - 2.0 * math.log(2.0)
    )


def tl_sqrt_coefficient(N: int) -> float:
    """S_OP ~ sqrt(8/pi) log(q) sqrt(L) for TL(N)."""
    if N < 3:
        raise DomainError("TL sqrt law needs N >= 3")
    return SQRT_8_OVER_PI * math.log(tl_q(N))


def predicted_law(family: Family, N: int, quantity: str, n: float | None = None) -> ScalingLaw:
    """The large-L law for (family, quantity), quantity in en|r3|sop|rtilde.

    rtilde needs the index n.  Everything is in nats of the half-chain value
    as a function of total length L.
    """
    q = quantity.lower()
    if family == Family.U1:
        if q in ("en", "r3"):
            return ScalingLaw("const", 0.0, 0.0)
        if q == "sop":
            return ScalingLaw("log", 0.5, 0.5 + math.log(math.sqrt(2 * math.pi) / 4.0))
    elif family == Family.SUN and N == 2:
        if q == "en":
            return ScalingLaw("log", 0.5, math.log(math.sqrt(2.0 / math.pi)))
        if q == "r3":
            return ScalingLaw("log", 1.0, -2.0 * math.log(2.0))
        if q == "sop":
            return ScalingLaw("log", 1.5, None)
    elif family == Family.SUN:
        if q == "en":
            return ScalingLaw("log", float(N * (N - 1)), None, kind="upper_bound")
        if q == "r3":
            return ScalingLaw(
                "log",
                N * (N - 1) / 2.0,
                None,
                coefficient_range=(N * (N - 1) / 2.0, (N * N - 1) / 2.0),
                note="bracketed only; finite-size slope converges to the lower edge",
            )
        if q == "sop":
            return ScalingLaw(
                "log",
                (N * N - 1) / 2.0,
                None,
                coefficient_range=((N * N - 1) / 2.0, float(N * N - 1)),
                note="bracketed only",
            )
    elif family == Family.PF:
        if q in ("en", "r3"):
            return ScalingLaw("const", 0.0, 0.0)
        if q == "sop":
            return ScalingLaw(
                "sqrt", None, None,
                note="sqrt(L) growth; the constant is not given in closed form",
            )
    elif family == Family.TL:
        if q == "en":
            return ScalingLaw("linear", tl_linear_coefficient(N, 1.0), None, kind="lower_bound")
        if q == "r3":
            return ScalingLaw("log", 1.5, None, kind="upper_bound")
        if q == "sop":
            return ScalingLaw("sqrt", tl_sqrt_coefficient(N), None)
        if q == "rtilde":
            if n is None:
                raise Unsupported("rtilde law needs the index n")
            if n < 2:
                return ScalingLaw("linear", tl_linear_coefficient(N, n), None, kind="lower_bound")
            return ScalingLaw("log", 1.5 / (n - 2.0), None, kind="upper_bound")
    raise Unsupported(f"no law for family={family.value}, N={N}, quantity={quantity}")


def binomial_asymptote(n: int, k_offset: int) -> LogReal:
    """log of the Gaussian approximation C(2n, n+k) ~ 2^(2n)/sqrt(pi n) e^(-k^2/n).

    Intended for n >= 64; smaller n is computed anyway but flagged with a
    warning since the relative log-error guarantee only holds in regime.
    """
    if n < 64:
        warnings.warn(f"binomial_asymptote outside its regime (n={n} < 64)", stacklevel=2)
    val = 2 * n * math.log(2.0) - 0.5 * math.log(math.pi * n) - k_offset**2 / n
    return LogReal(val, 1)


_BASES = {
    "const": lambda x: np.zeros_like(x),
    "log": np.log,
    "sqrt": np.sqrt,
    "linear": lambda x: x,
}


def fit_scaling(points, form: str) -> FitResult:
    """Least-squares fit of value against {1, f(L)} with f chosen by `form`.

    points is a sequence of (L, value) with strictly increasing L and at
    least 4 entries.
    """
    pts = sorted(points)
    if len(pts) < 4:
        raise TooFewPoints(f"need >= 4 points, got {len(pts)}")
    L = np.array([p[0] for p in pts], dtype=float)
    if np.any(np.diff(L) <= 0):
        raise ValueError("L values must be strictly increasing")
    y = np.array([p[1] for p in pts], dtype=float)
    if form not in _BASES:
        raise ValueError(f"unknown form {form!r}")
    x = _BASES[form](L)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    slope = 0.0 if form == "const" else float(coef[0])
    return FitResult(slope=slope, intercept=float(coef[1]), residual=resid,
                     window=(float(L[0]), float(L[-1])))


def fit_general(points, columns) -> np.ndarray:
    """Multi-term least squares: columns is a list of callables of L."""
    pts = sorted(points)
    L = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    A = np.column_stack([c(L) for c in columns])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def sun_r3_derivatives(N: int, L_max: int, decades: float = 1.0,
                       points: int = 8) -> list[tuple[float, float]]:
    """(mid-L, dR3/dlogL) secants on a geometric grid up to L_max.

    Uses the convolution evaluator, so L_max ~ 10^4 is cheap for N <= 5.
    """
    from .entanglement import sun_renyi3_half_chain

    step = 2 * N
    lo = max(step, int(L_max / 10**decades))
    grid = np.unique(
        (np.geomspace(lo, L_max, points) / step).round().astype(int) * step
    )
    grid = grid[grid >= step]
    vals = [sun_renyi3_half_chain(N, int(L)) for L in grid]
    out = []
    for i in range(len(grid) - 1):
        d = (vals[i + 1] - vals[i]) / (math.log(grid[i + 1]) - math.log(grid[i]))
        out.append((math.sqrt(grid[i] * grid[i + 1]), d))
    return out
