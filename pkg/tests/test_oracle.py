import math

import numpy as np
import pytest

import statent.oracle as orc
from statent.commutants import (
    CommutantSpec,
    Family,
    enumerate_sectors,
    singlet_dimension,
)
from statent.entanglement import log_negativity
from statent.oracle import (
    BadCut,
    DenseState,
    TooLarge,
    build_kraus,
    channel_fixed_point,
    conserved_operators,
    dense_generalized_renyi,
    dense_log_negativity,
    dense_ose,
    dense_renyi_negativity,
    embed_local,
    iterate_with_trajectory,
    pf_pattern_census,
    pt_eigenvalues,
    singlet_product_state,
    stack_reduce,
    stationary_state,
)


def test_su2_bond_kraus_are_projectors():
    ks = build_kraus(Family.SUN, 2, 2)
    k1, k2 = ks.channels[0].ops
    assert np.allclose(k1 @ k1, k1) and np.allclose(k2 @ k2, k2)
    assert np.allclose(k1 + k2, np.eye(4))


def test_tl3_e_relation():
    e = orc._tl_e(3)
    assert np.allclose(e @ e, 3 * e)
    ks = build_kraus(Family.TL, 3, 2)
    assert ks.completeness_defect <= 1e-12


def test_completeness_all_families():
    for fam, N, L in [
        (Family.SUN, 2, 4), (Family.SUN, 3, 3), (Family.TL, 3, 4),
        (Family.TL, 4, 3), (Family.U1, 2, 4), (Family.PF, 3, 4),
    ]:
        assert build_kraus(fam, N, L).completeness_defect <= 1e-12


def test_kraus_hermitian():
    for fam, N, L in [(Family.SUN, 3, 3), (Family.TL, 3, 3), (Family.U1, 2, 3), (Family.PF, 3, 3)]:
        for _, K in build_kraus(fam, N, L).operators():
            assert np.allclose(K, K.conj().T)


def test_strong_symmetry_commutes():
    for fam, N, L in [(Family.U1, 2, 4), (Family.SUN, 3, 3), (Family.PF, 3, 4)]:
        ks = build_kraus(fam, N, L)
        for O in conserved_operators(fam, N, L):
            for sites, K in ks.operators():
                Kf = embed_local(K, sites, N, L)
                assert np.max(np.abs(Kf @ O - O @ Kf)) <= 1e-12


def test_too_large():
    with pytest.raises(TooLarge):
        build_kraus(Family.TL, 3, 12)


def test_identity_is_fixed():
    for fam, N, L in [(Family.SUN, 2, 4), (Family.TL, 3, 4), (Family.U1, 2, 4), (Family.PF, 3, 4)]:
        ks = build_kraus(fam, N, L)
        ident = np.eye(N**L) / N**L
        assert np.max(np.abs(orc.apply_sweep(ident.copy(), ks) - ident)) <= 1e-15


def test_su2_L4_fixed_point_is_maximally_mixed_singlet():
    st = stationary_state(CommutantSpec(Family.SUN, 2, 4, 2))
    st.validate()
    assert np.trace(st.matrix @ st.matrix).real == pytest.approx(0.5, abs=1e-10)
    # independent construction of Pi^0: projector onto the S_tot^2 null space
    from conftest import spin_half_total_spin_squared

    w, v = np.linalg.eigh(spin_half_total_spin_squared(4))
    null = v[:, np.abs(w) < 1e-9]
    pi0 = null @ null.conj().T
    assert np.linalg.norm(st.matrix - pi0 / 2) <= 10 * 1e-12 + 1e-10
    assert dense_log_negativity(st, 2) == pytest.approx(math.log(2), abs=1e-10)
    assert dense_renyi_negativity(st, 2, 3) == pytest.approx(math.log(9 / 5), abs=1e-10)
    assert dense_ose(st, 2) == pytest.approx(math.log(6), abs=1e-10)


def test_dense_quantities_on_simple_states():
    # product state: PPT, zero negativity, rank-1 vectorization
    rho_a = np.diag([0.7, 0.3])
    rho_b = np.diag([0.5, 0.25, 0.25, 0.0])
    st = DenseState(np.kron(rho_a, rho_b), [2, 2, 2])
    assert dense_log_negativity(st, 1) == pytest.approx(0.0, abs=1e-12)
    assert dense_ose(st, 1) == pytest.approx(0.0, abs=1e-12)
    # two-qubit singlet: E_N = log 2, R3 = S_3 of one bit = log 2... check spectrum
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2)
    st = DenseState(np.outer(psi, psi), [2, 2])
    assert dense_log_negativity(st, 1) == pytest.approx(math.log(2), abs=1e-12)
    # for a pure state R_n with odd n is proportional to a Renyi entropy;
    # the two-qubit singlet has flat Schmidt spectrum {1/2, 1/2}:
    # Tr (rho^T_B)^3 = sum s^6 (4 terms of (1/2)^3 magnitude, one negative...)
    got = dense_renyi_negativity(st, 1, 3)
    w = pt_eigenvalues(st, 1)
    assert got == pytest.approx(-math.log(np.sum(w**3)), abs=1e-12)


def test_bad_cut():
    st = DenseState(np.eye(4) / 4, [2, 2])
    with pytest.raises(BadCut):
        dense_log_negativity(st, 2)


def test_pt_block_spectrum_multiset():
    # eigenvalues +-1/(D0 d) with d(d+1)/2 and d(d-1)/2 copies per (a, b)
    for fam, N, L in [(Family.SUN, 2, 4), (Family.SUN, 2, 8), (Family.TL, 3, 4), (Family.TL, 3, 6)]:
        LA = L // 2 if (L // 2) % 2 == 0 else 2
        spec = CommutantSpec(fam, N, L, LA)
        st = stationary_state(spec)
        D0 = singlet_dimension(spec)
        expected = []
        for r in enumerate_sectors(spec):
            mag = 1.0 / (D0 * r.d)
            block = r.pattern_count * r.D_A * r.D_B
            expected += [mag] * (r.d * (r.d + 1) // 2 * block)
            expected += [-mag] * (r.d * (r.d - 1) // 2 * block)
        got = [w for w in pt_eigenvalues(st, LA) if w != 0.0]
        assert len(got) == len(expected)
        for g, e in zip(sorted(got), sorted(expected)):
            assert g == pytest.approx(e, abs=1e-9)


def test_strong_symmetry_preserved_along_trajectory():
    # U(1): <S^z_tot> constant under the sweep
    ks = build_kraus(Family.U1, 2, 6)
    rho = singlet_product_state(Family.U1, 2, 6).matrix.copy()
    sz = conserved_operators(Family.U1, 2, 6)[0]
    vals = []
    for _ in range(40):
        vals.append(float(np.trace(sz @ rho).real))
        rho = orc.apply_sweep(rho, ks)
    assert max(abs(v - vals[0]) for v in vals) <= 1e-9
    # TL(3): sector projectors (from the converged fixed point) conserved
    spec = CommutantSpec(Family.TL, 3, 4, 2)
    ks = build_kraus(Family.TL, 3, 4)
    fixed = stationary_state(spec)
    proj = fixed.matrix * singlet_dimension(spec)  # = Pi^0
    assert np.allclose(proj @ proj, proj, atol=1e-8)
    rho = singlet_product_state(Family.TL, 3, 4).matrix.copy()
    vals = []
    for _ in range(40):
        vals.append(float(np.trace(proj @ rho).real))
        rho = orc.apply_sweep(rho, ks)
    assert max(abs(v - vals[0]) for v in vals) <= 1e-9


def test_fixed_point_independent_of_kraus_normalization():
    # replace the U(1) lazy split 1/2:1/2 by 1/5:4/5; same commutant, same
    # fixed point
    import copy

    base = build_kraus(Family.U1, 2, 6)
    alt = copy.deepcopy(base)
    for ch in alt.channels:
        if len(ch.sites) == 2:
            # ops are [1, hop, stay] scaled by 1/sqrt(2); reweight to 1/5:4/5
            _, hop, stay = (math.sqrt(2) * op for op in ch.ops)
            a, b = math.sqrt(0.2), math.sqrt(0.8)
            ch.ops = [a * np.eye(4), b * hop, b * stay]
    assert alt.completeness_defect <= 1e-12
    rho0 = singlet_product_state(Family.U1, 2, 6)
    st1 = channel_fixed_point(base, rho0)
    st2 = channel_fixed_point(alt, rho0)
    assert np.max(np.abs(st1.matrix - st2.matrix)) <= 1e-10


def test_trajectory_monotone_saturation_tl3():
    spec = CommutantSpec(Family.TL, 3, 4, 2)
    ks = build_kraus(Family.TL, 3, 4)
    rho0 = singlet_product_state(Family.TL, 3, 4)
    st, rows = iterate_with_trajectory(ks, rho0, 2, tol=1e-12)
    target = log_negativity(enumerate_sectors(spec), singlet_dimension(spec))
    dev = [abs(r["E_N"] - target) for r in rows]
    assert dev[-1] <= 1e-6
    tail = dev[3:]
    assert all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))


def test_stack_reduce_and_census():
    assert stack_reduce((0, 0)) == ()
    assert stack_reduce((0, 1, 1, 0)) == ()
    assert stack_reduce((0, 1, 0)) == (0, 1, 0)
    c32 = pf_pattern_census(3, 2)
    assert c32[()] == 3
    assert all(c32[p] == 1 for p in c32 if len(p) == 2)
    c22 = pf_pattern_census(2, 2)
    assert c22 == {(): 2, (0, 1): 1, (1, 0): 1}
    c34 = pf_pattern_census(3, 4)
    assert sum(c34.values()) == 81
    with pytest.raises(TooLarge):
        pf_pattern_census(10, 10)


def test_singlet_product_states_are_singlets():
    # the initial states must lie inside the lambda_tot = 0 sector:
    # fixed-point purity then equals 1/D0
    for fam, N, L in [(Family.SUN, 3, 6), (Family.TL, 4, 4), (Family.PF, 3, 4), (Family.U1, 2, 6)]:
        LA = 2 if fam in (Family.TL, Family.PF) else L // 2
        spec = CommutantSpec(fam, N, L, LA)
        st = stationary_state(spec)
        D0 = singlet_dimension(spec)
        assert np.trace(st.matrix @ st.matrix).real == pytest.approx(1.0 / D0, abs=1e-9)


def test_dense_generalized_matches_closed_form():
    spec = CommutantSpec(Family.TL, 4, 4, 2)
    st = stationary_state(spec)
    from statent.entanglement import generalized_renyi

    secs, D0 = enumerate_sectors(spec), singlet_dimension(spec)
    assert dense_generalized_renyi(st, 2, 0.5) == pytest.approx(
        generalized_renyi(secs, D0, 0.5), abs=1e-9
    )
