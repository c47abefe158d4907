"""Exact SU(2) Clebsch-Gordan coefficients and sector-mixture negativity.

The CG values are computed from the Racah single-sum closed form with
big-rational factorial ratios, Condon-Shortley sign convention.  A value is
carried as sign * sqrt(radicand) with an exact rational radicand, which is
closed under multiplication; sums of same-kernel products stay exact, so the
orthonormality tests need no tolerances at all.

On top of that sit the total-spin-resolved negativity of stationary states
with weight on several lambda_tot sectors, and the Haar-random-mixture
ensemble used to study how entanglement washes out as more sectors mix in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .commutants import su2_sector_dim
from .exactnum import factorial


class InvalidSpin(ValueError):
    pass


class WeightError(ValueError):
    pass


class NoCrossing(ValueError):
    pass


class MultipleCrossings(ValueError):
    pass


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * f with f squarefree (trial division; factors stay small here)."""
    s, f = 1, 1
    d = 2
    m = n
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            s *= d ** (e // 2)
            if e % 2:
                f *= d
        d += 1 if d == 2 else 2
    f *= m
    return s, f


@dataclass(frozen=True)
class SqrtRational:
    """sign * sqrt(radicand) with radicand an exact non-negative Fraction."""

    sign: int
    radicand: Fraction

    @staticmethod
    def zero() -> "SqrtRational":
        return SqrtRational(0, Fraction(0))

    def __mul__(self, other: "SqrtRational") -> "SqrtRational":
        s = self.sign * other.sign
        if s == 0:
            return SqrtRational.zero()
        return SqrtRational(s, self.radicand * other.radicand)

    def canonical(self) -> tuple[Fraction, int]:
        """(coefficient, squarefree kernel): value = coefficient*sqrt(kernel)."""
        if self.sign == 0:
            return Fraction(0), 1
        num, den = self.radicand.numerator, self.radicand.denominator
        sn, fn = _squarefree_split(num)
        sd, fd = _squarefree_split(den)
        # sqrt(num/den) = (sn/(sd*fd)) * sqrt(fn*fd)
        return Fraction(self.sign * sn, sd * fd), fn * fd

    def to_float(self) -> float:
        return self.sign * math.sqrt(float(self.radicand))


def exact_sum(values: list[SqrtRational]) -> dict[int, Fraction]:
    """Exact sum grouped by squarefree kernel: {kernel: coefficient}."""
    out: dict[int, Fraction] = {}
    for v in values:
        c, k = v.canonical()
        if c == 0:
            continue
        out[k] = out.get(k, Fraction(0)) + c
    return {k: c for k, c in out.items() if c != 0}


def _as_two_j(x) -> int:
    two = Fraction(x) * 2
    if two.denominator != 1:
        raise InvalidSpin(f"{x} is not a half-integer")
    return int(two)


@lru_cache(maxsize=None)
def _cg_two_j(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> SqrtRational:
    # Racah closed form; all arguments are doubled spins (exact integers).
    if tM != tm1 + tm2:
        return SqrtRational.zero()
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tM) > tJ:
        return SqrtRational.zero()
    if (tj1 + tm1) % 2 or (tj2 + tm2) % 2 or (tJ + tM) % 2:
        raise InvalidSpin("m must differ from j by an integer")
    if tJ > tj1 + tj2 or tJ < abs(tj1 - tj2) or (tj1 + tj2 + tJ) % 2:
        return SqrtRational.zero()

    def f(tx: int) -> int:
        if tx % 2:
            raise InvalidSpin("non-integer factorial argument")
        return factorial(tx // 2)

    pref = Fraction(
        (tJ + 1)
        * f(tj1 + tj2 - tJ) * f(tj1 - tj2 + tJ) * f(-tj1 + tj2 + tJ)
        * f(tJ + tM) * f(tJ - tM)
        * f(tj1 + tm1) * f(tj1 - tm1) * f(tj2 + tm2) * f(tj2 - tm2),
        f(tj1 + tj2 + tJ + 2),
    )
    k_lo = max(0, (tj2 - tJ - tm1) // 2, (tj1 - tJ + tm2) // 2)
    k_hi = min(
        (tj1 + tj2 - tJ) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2
    )
    s = Fraction(0)
    for k in range(k_lo, k_hi + 1):
        den = (
            factorial(k)
            * f(tj1 + tj2 - tJ - 2 * k)
            * f(tj1 - tm1 - 2 * k)
            * f(tj2 + tm2 - 2 * k)
            * f(tJ - tj2 + tm1 + 2 * k)
            * f(tJ - tj1 - tm2 + 2 * k)
        )
        s += Fraction(-1 if k % 2 else 1, den)
    if s == 0:
        return SqrtRational.zero()
    return SqrtRational(1 if s > 0 else -1, s * s * pref)


def cg_coefficient(lambda_tot, lambda_a, lambda_b, m) -> SqrtRational:
    """<lambda_a m; lambda_b -m | lambda_tot 0> exactly (Condon-Shortley).

    Spins may be ints, Fractions or half-integer floats.  Violated triangle
    or selection rules give an exact zero, not an error.
    """
    tJ = _as_two_j(lambda_tot)
    tja = _as_two_j(lambda_a)
    tjb = _as_two_j(lambda_b)
    tm = _as_two_j(m)
    return _cg_two_j(tja, tm, tjb, -tm, tJ, 0)


def cg_singlet(lam, m) -> SqrtRational:
    """Reference value (-1)^(lambda-m)/sqrt(2 lambda + 1) for the singlet case."""
    tl, tm = _as_two_j(lam), _as_two_j(m)
    sign = 1 if ((tl - tm) // 2) % 2 == 0 else -1
    return SqrtRational(sign, Fraction(1, tl + 1))


# ---------------------------------------------------------------------------
# negativity for stationary states with weight on several lambda_tot sectors
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cg_float_table(L: int, L_A: int, lambda_tot: int) -> tuple:
    """(lam_a, lam_b, |c_m| row) triples for one lambda_tot (floats)."""
    L_B = L - L_A
    rows = []
    for la in range(L_A // 2 + 1):
        lb_lo = abs(la - lambda_tot)
        lb_hi = min(la + lambda_tot, L_B // 2)
        for lb in range(lb_lo, lb_hi + 1):
            mm = min(la, lb)
            cs = np.array(
                [cg_coefficient(lambda_tot, la, lb, m).to_float() for m in range(-mm, mm + 1)]
            )
            rows.append((la, lb, cs))
    return tuple(rows)


def negativity_fixed_lambda(L: int, L_A: int, p: dict[int, float]) -> float:
    """log negativity of rho = sum_t p_t Pi^(t)_{m=0} / D_t across the cut L_A.

    Block eigenvalues of rho^T_B are sum_t (p_t/D_t) c_m(t) c_m'(t); the trace
    norm sums their absolute values.  The absolute value wraps the whole
    lambda_tot sum, which is what makes the full-m_tot=0 Dirichlet-mean
    mixture come out separable (it reduces to the U(1) state by CG
    orthonormality).  For weight on a single sector this is identical to
    summing |c_m c_m'| per sector.
    """
    if L % 2 or L_A % 2 or (L - L_A) % 2:
        raise ValueError("need even L, L_A, L_B")
    tot = math.fsum(p.values())
    if abs(tot - 1.0) > 1e-12:
        raise WeightError(f"sector weights sum to {tot!r}, not 1")
    L_B = L - L_A
    pref = {
        t: w / su2_sector_dim(L, t) for t, w in p.items() if w != 0.0
    }
    # group CG rows by (lam_a, lam_b) so the lambda_tot sum sits inside |.|
    blocks: dict[tuple[int, int], list[tuple[float, np.ndarray]]] = {}
    for t, w in pref.items():
        for la, lb, cs in _cg_float_table(L, L_A, t):
            blocks.setdefault((la, lb), []).append((w, cs))
    total = 0.0
    for (la, lb), parts in blocks.items():
        mm = min(la, lb)
        n = 2 * mm + 1
        w = np.zeros((n, n))
        for weight, cs in parts:
            w += weight * np.outer(cs, cs)
        tn = float(np.sum(np.abs(w)))
        total += su2_sector_dim(L_A, la) * su2_sector_dim(L_B, lb) * tn
    return math.log(total)


@dataclass(frozen=True)
class HaarEnsembleSpec:
    """Haar-random initial states on the first lambda_max+1 total-spin sectors."""

    L: int
    lambda_max: int
    samples: int
    seed: int
    L_A: int | None = None

    def cut(self) -> int:
        return self.L // 2 if self.L_A is None else self.L_A

    def validate(self) -> None:
        if self.lambda_max < 0 or self.lambda_max > self.L // 2:
            raise ValueError(f"need 0 <= lambda_max <= L/2, got {self.lambda_max}")
        if self.samples < 1:
            raise ValueError("need samples >= 1")


def _draw_weights(spec: HaarEnsembleSpec, index: int, dims: np.ndarray) -> np.ndarray:
    # counter-based stream per draw: parallel and serial runs agree
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((spec.seed, index))))
    gam = rng.gamma(shape=dims)
    return gam / gam.sum()


def haar_average_negativity(spec: HaarEnsembleSpec) -> tuple[float, float]:
    """(mean, stderr) of E_N over Haar-sampled sector-weight mixtures.

    A complex-Gaussian vector on the direct sum of m_tot=0 sectors puts
    Gamma(shape D_lambda) weight on sector lambda, so p is Dirichlet with
    concentrations D_lambda; the 2^L-dimensional vector itself is never
    materialized.
    """
    spec.validate()
    lams = list(range(spec.lambda_max + 1))
    if spec.lambda_max == 0:
        # degenerate ensemble: every draw is the singlet stationary state
        val = negativity_fixed_lambda(spec.L, spec.cut(), {0: 1.0})
        return val, 0.0
    dims = np.array([float(su2_sector_dim(spec.L, t)) for t in lams])
    vals = np.empty(spec.samples)
    for i in range(spec.samples):
        w = _draw_weights(spec, i, dims)
        vals[i] = negativity_fixed_lambda(
            spec.L, spec.cut(), {t: float(w[j]) for j, t in enumerate(lams)}
        )
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(spec.samples)) if spec.samples > 1 else 0.0
    return mean, stderr


def crossing_point(xs, curve_a, curve_b) -> float:
    """Abscissa where curve_a - curve_b changes sign, by linear interpolation.

    Requires exactly one sign change on the grid; identical curves raise
    NoCrossing, several sign changes raise MultipleCrossings.
    """
    xs = np.asarray(xs, dtype=float)
    diff = np.asarray(curve_a, dtype=float) - np.asarray(curve_b, dtype=float)
    if xs.shape != diff.shape or xs.size < 2:
        raise ValueError("curves must share a grid of at least two points")
    nz = [(x, d) for x, d in zip(xs, diff) if d != 0.0]
    if not nz:
        raise NoCrossing("curves are identical on this grid")
    crossings = []
    for (x0, d0), (x1, d1) in zip(nz, nz[1:]):
        if d0 * d1 < 0:
            crossings.append(x0 - d0 * (x1 - x0) / (d1 - d0))
    if not crossings:
        raise NoCrossing("curves do not cross on this grid")
    if len(crossings) > 1:
        raise MultipleCrossings(f"{len(crossings)} crossings on this grid")
    return float(crossings[0])
