"""Brute-force ground truth on small chains.

Builds the local Kraus channels for each family, iterates the composite
channel to its fixed point, and computes every entanglement quantity straight
from the dense density matrix.  Nothing here knows about sector data: this is
the independent side of the dual-route check that certifies the closed forms
(and the pair-flip counting) at small L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .commutants import CommutantSpec, Family, check_admissible

DEFAULT_DIM_CAP = 6561  # N^L above this refuses to build dense operators

# Floor below which partial-transpose eigenvalues are treated as exact zeros.
# The fixed-point iteration stops at defect ~1e-12, so spurious eigenvalues of
# that size survive a 1e-12 floor and get amplified by fractional powers in
# the generalized Renyi negativities; 1e-10 is still five orders below the
# smallest physical PT eigenvalue 1/(D0 max d) at any dense-reachable size.
EIG_FLOOR = 1e-10


class TooLarge(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


class BadCut(ValueError):
    pass


@dataclass
class DenseState:
    """Density matrix on a chain of qudits with uniform site dimension."""

    matrix: np.ndarray
    site_dims: list[int]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def validate(self, atol: float = 1e-10) -> None:
        m = self.matrix
        if np.linalg.norm(m - m.conj().T) > 1e-12 * max(1.0, np.linalg.norm(m)):
            raise ValueError("state is not Hermitian")
        if abs(self.trace - 1.0) > 1e-12:
            raise ValueError(f"trace is {self.trace}, not 1")
        w = np.linalg.eigvalsh(m)
        if w.min() < -atol:
            raise ValueError(f"negative eigenvalue {w.min()}")


@dataclass
class LocalChannel:
    """One CPTP factor: Hermitian Kraus operators supported on given sites."""

    sites: tuple[int, ...]
    ops: list[np.ndarray]

    def completeness_defect(self) -> float:
        acc = sum(k.conj().T @ k for k in self.ops)
        return float(np.max(np.abs(acc - np.eye(acc.shape[0]))))


@dataclass
class KrausSet:
    family: Family
    N: int
    L: int
    channels: list[LocalChannel] = field(default_factory=list)

    @property
    def completeness_defect(self) -> float:
        return max(c.completeness_defect() for c in self.channels)

    def operators(self):
        for ch in self.channels:
            for k in ch.ops:
                yield ch.sites, k


def _swap(N: int) -> np.ndarray:
    P = np.zeros((N * N, N * N))
    for a in range(N):
        for b in range(N):
            P[b * N + a, a * N + b] = 1.0
    return P


def _tl_e(N: int) -> np.ndarray:
    v = np.zeros(N * N)
    for s in range(N):
        v[s * N + s] = 1.0
    return np.outer(v, v)  # = N |singlet><singlet|


def build_kraus(family: Family, N: int, L: int, dim_cap: int = DEFAULT_DIM_CAP) -> KrausSet:
    """Local Hermitian Kraus channels whose commutant is the requested family.

    SU(N): {(1+P)/2, (1-P)/2} per bond (P the two-site swap).
    TL(N): {e/N, 1 - e/N} per bond with e = sum |ss><s's'|; e^2 = N e makes
           this trace preserving for every N (and for N = 3 it is the e/3
           set; for N = 2 it coincides with the SU(2) projector pair).
    U(1):  per bond {1/sqrt(2), hop/sqrt(2), stay/sqrt(2)} with hop the
           hopping flip |01><10|+h.c. and stay = 1 - hop^2, plus a
           projective S^z dephasing channel per site.
    PF(N): per bond one channel {1/sqrt(2), h/sqrt(2), (1-h^2)/sqrt(2)} for
           every color pair (h the pair flip), plus the same dephasing.

    The identity component in the U(1)/PF sets makes the channel lazy: the
    bare flip acts unitarily inside its two-state subspace, so without it
    the sweep has a -1 eigenvalue and the iteration cycles instead of
    converging.  The identity is in the bond algebra anyway, so the
    commutant (hence the fixed point) is unchanged; the tests re-run with a
    different convex split to confirm normalization independence.
    """
    if N**L > dim_cap:
        raise TooLarge(f"N^L = {N**L} exceeds cap {dim_cap}")
    ks = KrausSet(family, N, L)
    if family == Family.SUN:
        P = _swap(N)
        eye = np.eye(N * N)
        for j in range(L - 1):
            ks.channels.append(LocalChannel((j, j + 1), [(eye + P) / 2, (eye - P) / 2]))
    elif family == Family.TL:
        e = _tl_e(N)
        eye = np.eye(N * N)
        for j in range(L - 1):
            ks.channels.append(LocalChannel((j, j + 1), [e / N, eye - e / N]))
    elif family == Family.U1:
        if N != 2:
            raise ValueError("U(1) family is defined for N = 2")
        hop = np.zeros((4, 4))
        hop[1, 2] = hop[2, 1] = 1.0  # |01><10| + |10><01|
        stay = np.eye(4) - np.diag([0.0, 1.0, 1.0, 0.0])
        r = 1.0 / math.sqrt(2.0)
        for j in range(L - 1):
            ks.channels.append(
                LocalChannel((j, j + 1), [r * np.eye(4), r * hop, r * stay])
            )
        for j in range(L):
            ks.channels.append(
                LocalChannel((j,), [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
            )
    elif family == Family.PF:
        eye = np.eye(N * N)
        r = 1.0 / math.sqrt(2.0)
        for j in range(L - 1):
            for s in range(N):
                for t in range(s + 1, N):
                    h = np.zeros((N * N, N * N))
                    h[s * N + s, t * N + t] = h[t * N + t, s * N + s] = 1.0
                    ks.channels.append(
                        LocalChannel((j, j + 1), [r * eye, r * h, r * (eye - h @ h)])
                    )
        for j in range(L):
            projs = [np.diag([1.0 if a == s else 0.0 for a in range(N)]) for s in range(N)]
            ks.channels.append(LocalChannel((j,), projs))
    else:  # pragma: no cover
        raise ValueError(f"unknown family {family}")
    defect = ks.completeness_defect
    if defect > 1e-12:
        raise AssertionError(f"Kraus completeness defect {defect}")
    return ks


def conserved_operators(family: Family, N: int, L: int) -> list[np.ndarray]:
    """Known strong-symmetry generators to check [K, O] = 0 against.

    U(1): S^z_tot.  SU(N): all global E_ab = sum_j |a><b|_j.  PF(N): the
    staggered color charges sum_j (-1)^j |s><s|_j.  TL(N) has no simple
    local closed form for its (Read-Saleur) conserved quantities; its
    conservation is checked dynamically via sector projectors instead.
    """
    out = []
    if family == Family.U1:
        sz = np.diag([0.5, -0.5])
        out.append(_site_sum(sz, 2, L))
    elif family == Family.SUN:
        for a in range(N):
            for b in range(N):
                e = np.zeros((N, N))
                e[a, b] = 1.0
                out.append(_site_sum(e, N, L))
    elif family == Family.PF:
        for s in range(N - 1):
            e = np.zeros((N, N))
            e[s, s] = 1.0
            out.append(_site_sum(e, N, L, staggered=True))
    return out


def _site_sum(op: np.ndarray, N: int, L: int, staggered: bool = False) -> np.ndarray:
    dim = N**L
    total = np.zeros((dim, dim))
    for j in range(L):
        full = np.kron(np.kron(np.eye(N**j), op), np.eye(N ** (L - j - 1)))
        total += (-1.0) ** j * full if staggered else full
    return total


def embed_local(op: np.ndarray, sites: tuple[int, ...], N: int, L: int) -> np.ndarray:
    """Dense embedding of a 1- or 2-site operator (contiguous sites)."""
    j = sites[0]
    w = len(sites)
    return np.kron(np.kron(np.eye(N**j), op), np.eye(N ** (L - j - w)))


def _channel_superop(ch: LocalChannel) -> np.ndarray:
    """S[(a,c),(b,d)] = sum_K K[a,b] K*[c,d]: the channel on the local pair index."""
    S = sum(np.kron(K, K.conj()) for K in ch.ops)
    if np.iscomplexobj(S) and not S.imag.any():
        S = S.real
    return S


def _sweep_plan(kraus: KrausSet) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Superoperators in sweep order, with same-support neighbors composed.

    The composition order within the sweep is fixed (bonds j = 1..L-1 in
    construction order, then site channels); it matters because the local
    channels do not commute.
    """
    plan: list[tuple[tuple[int, ...], np.ndarray]] = []
    for ch in kraus.channels:
        S = _channel_superop(ch)
        if plan and plan[-1][0] == ch.sites:
            plan[-1] = (ch.sites, S @ plan[-1][1])
        else:
            plan.append((ch.sites, S))
    return plan


def _apply_superop(rho: np.ndarray, sites: tuple[int, ...], S: np.ndarray,
                   N: int, L: int) -> np.ndarray:
    j = sites[0]
    w = len(sites)
    d = N**w
    A = N**j
    B = N ** (L - j - w)
    r = rho.reshape(A, d, B, A, d, B)
    x = np.ascontiguousarray(r.transpose(1, 4, 0, 2, 3, 5)).reshape(d * d, -1)
    y = (S @ x).reshape(d, d, A, B, A, B)
    return np.ascontiguousarray(y.transpose(2, 0, 3, 4, 1, 5)).reshape(rho.shape)


def apply_sweep(rho: np.ndarray, kraus: KrausSet) -> np.ndarray:
    """One full sweep of the composite channel (see _sweep_plan for order)."""
    plan = getattr(kraus, "_plan", None)
    if plan is None:
        plan = _sweep_plan(kraus)
        kraus._plan = plan
    for sites, S in plan:
        rho = _apply_superop(rho, sites, S, kraus.N, kraus.L)
    return rho


def channel_fixed_point(
    kraus: KrausSet,
    rho0: DenseState,
    tol: float = 1e-12,
    max_sweeps: int = 1_000_000,
    stall_ratio: float = 0.9999,
    stall_window: int = 10_000,
) -> DenseState:
    """Iterate full sweeps until the Frobenius defect drops below tol.

    Aborts with NoConvergence if max_sweeps is exhausted or the defect decay
    ratio stays above stall_ratio for a whole stall window (uniqueness of
    the fixed point is guaranteed, a rate is not).
    """
    rho = np.array(rho0.matrix)
    if np.iscomplexobj(rho) and np.max(np.abs(rho.imag)) == 0.0:
        rho = rho.real.copy()  # all Kraus sets here are real; halves the cost
    prev_defect = None
    stalled = 0
    for sweep in range(1, max_sweeps + 1):
        nxt = apply_sweep(rho, kraus)
        defect = float(np.linalg.norm(nxt - rho))
        rho = nxt
        if defect <= tol:
            return DenseState(rho, list(rho0.site_dims))
        if prev_defect is not None and prev_defect > 0:
            stalled = stalled + 1 if defect / prev_defect > stall_ratio else 0
            if stalled >= stall_window:
                raise NoConvergence(
                    f"defect stalled near {defect:.3e} after {sweep} sweeps"
                )
        prev_defect = defect
    raise NoConvergence(f"no convergence within {max_sweeps} sweeps (defect {defect:.3e})")


def iterate_with_trajectory(
    kraus: KrausSet,
    rho0: DenseState,
    cut: int,
    tol: float = 1e-12,
    max_sweeps: int = 100_000,
) -> tuple[DenseState, list[dict]]:
    """Like channel_fixed_point but records (sweep, E_N, R3, S_OP, defect)."""
    rho = np.array(rho0.matrix)
    rows = []
    st = DenseState(rho, list(rho0.site_dims))
    rows.append(
        {
            "sweep": 0,
            "E_N": dense_log_negativity(st, cut),
            "R3": dense_renyi_negativity(st, cut, 3),
            "S_OP": dense_ose(st, cut),
            "defect": float("nan"),
        }
    )
    for sweep in range(1, max_sweeps + 1):
        nxt = apply_sweep(rho, kraus)
        defect = float(np.linalg.norm(nxt - rho))
        rho = nxt
        st = DenseState(rho, list(rho0.site_dims))
        rows.append(
            {
                "sweep": sweep,
                "E_N": dense_log_negativity(st, cut),
                "R3": dense_renyi_negativity(st, cut, 3),
                "S_OP": dense_ose(st, cut),
                "defect": defect,
            }
        )
        if defect <= tol:
            break
    else:
        raise NoConvergence(f"no convergence within {max_sweeps} sweeps")
    return st, rows


# ---------------------------------------------------------------------------
# initial states in the singlet sector
# ---------------------------------------------------------------------------

def singlet_product_state(family: Family, N: int, L: int) -> DenseState:
    """A pure product-of-singlets state inside the lambda_tot = 0 sector.

    SU(N): antisymmetrized N-site blocks; TL(N): two-site dimers
    sum_s |ss>/sqrt(N); U(1): the Neel product state (M_tot = 0); PF(N): the
    all-zeros product state (empty dot pattern).
    """
    if family == Family.SUN:
        block = np.zeros(N**N)
        from itertools import permutations

        for perm in permutations(range(N)):
            idx = 0
            for s in perm:
                idx = idx * N + s
            sgn = _perm_sign(perm)
            block[idx] = sgn
        block /= np.linalg.norm(block)
        psi = block
        for _ in range(L // N - 1):
            psi = np.kron(psi, block)
    elif family == Family.TL:
        dimer = np.zeros(N * N)
        for s in range(N):
            dimer[s * N + s] = 1.0
        dimer /= math.sqrt(N)
        psi = dimer
        for _ in range(L // 2 - 1):
            psi = np.kron(psi, dimer)
    elif family == Family.U1:
        idx = 0
        for j in range(L):
            idx = idx * 2 + (j % 2)
        psi = np.zeros(2**L)
        psi[idx] = 1.0
    elif family == Family.PF:
        psi = np.zeros(N**L)
        psi[0] = 1.0
    else:  # pragma: no cover
        raise ValueError(f"unknown family {family}")
    rho = np.outer(psi, psi)
    return DenseState(rho, [N] * L)


def _perm_sign(perm) -> float:
    sign = 1.0
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        ln = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        if ln % 2 == 0:
            sign = -sign
    return sign


def stationary_state(spec: CommutantSpec, tol: float = 1e-12) -> DenseState:
    """Fixed point reached from the singlet product state (= Pi^0 / D_0)."""
    check_admissible(spec)
    kraus = build_kraus(spec.family, spec.N, spec.L)
    rho0 = singlet_product_state(spec.family, spec.N, spec.L)
    return channel_fixed_point(kraus, rho0, tol=tol)


# ---------------------------------------------------------------------------
# dense entanglement quantities
# ---------------------------------------------------------------------------

def _split_dims(state: DenseState, cut: int) -> tuple[int, int]:
    L = len(state.site_dims)
    if not 0 < cut < L:
        raise BadCut(f"cut must be inside the chain, got {cut} of {L}")
    dA = int(np.prod(state.site_dims[:cut]))
    dB = int(np.prod(state.site_dims[cut:]))
    return dA, dB


def partial_transpose(state: DenseState, cut: int) -> np.ndarray:
    dA, dB = _split_dims(state, cut)
    r = state.matrix.reshape(dA, dB, dA, dB)
    return np.ascontiguousarray(r.transpose(0, 3, 2, 1)).reshape(dA * dB, dA * dB)


def pt_eigenvalues(state: DenseState, cut: int) -> np.ndarray:
    """Eigenvalues of rho^T_B (Hermitian), tiny noise floored to zero."""
    w = np.linalg.eigvalsh(partial_transpose(state, cut))
    w[np.abs(w) < EIG_FLOOR] = 0.0
    return w


def dense_log_negativity(state: DenseState, cut: int) -> float:
    w = pt_eigenvalues(state, cut)
    return float(np.log(np.sum(np.abs(w))))


def _rho_spectrum(state: DenseState) -> np.ndarray:
    # rho is PSD; noise of either sign is floored to exact zero so that
    # fractional powers neither NaN (negatives) nor blow up (sqrt of ~1e-13)
    lam = np.linalg.eigvalsh(state.matrix)
    lam[lam < EIG_FLOOR] = 0.0
    return lam


def dense_renyi_negativity(state: DenseState, cut: int, n: int) -> float:
    if n < 1:
        raise ValueError("need n >= 1")
    w = pt_eigenvalues(state, cut)
    lam = _rho_spectrum(state)
    return float(-np.log(np.sum(w**n) / np.sum(lam**n)))


def dense_generalized_renyi(state: DenseState, cut: int, n: float) -> float:
    if abs(n - 2.0) < 1e-9:
        raise ValueError("undefined at n = 2")
    w = np.abs(pt_eigenvalues(state, cut))
    lam = _rho_spectrum(state)
    return float(np.log(np.sum(w**n) / np.sum(lam**n)) / (2.0 - n))


def dense_ose(state: DenseState, cut: int) -> float:
    """Von Neumann entropy of the vectorized, Frobenius-normalized state."""
    dA, dB = _split_dims(state, cut)
    r = state.matrix.reshape(dA, dB, dA, dB)
    m = np.ascontiguousarray(r.transpose(0, 2, 1, 3)).reshape(dA * dA, dB * dB)
    m = m / np.linalg.norm(m)
    s = np.linalg.svd(m, compute_uv=False)
    p = s**2
    p = p[p > 1e-24]
    return float(-np.sum(p * np.log(p)))


# ---------------------------------------------------------------------------
# pair-flip pattern census (certifies the counting DP)
# ---------------------------------------------------------------------------

def stack_reduce(word) -> tuple[int, ...]:
    """Left-to-right pairing reduction: pop equal neighbors, push otherwise."""
    stack: list[int] = []
    for s in word:
        if stack and stack[-1] == s:
            stack.pop()
        else:
            stack.append(s)
    return tuple(stack)


def pf_pattern_census(N: int, L: int, cap: int = 10_000_000) -> dict[tuple[int, ...], int]:
    """Histogram of dot patterns over every length-L product state."""
    if N**L > cap:
        raise TooLarge(f"N^L = {N**L} exceeds cap {cap}")
    counts: dict[tuple[int, ...], int] = {}
    for word in product(range(N), repeat=L):
        pat = stack_reduce(word)
        counts[pat] = counts.get(pat, 0) + 1
    return counts
