import numpy as np


def spin_half_total_spin_squared(L):
    """Dense S_tot^2 on L spin-1/2 sites (oracle for singlet counting)."""
    sx = np.array([[0, 1], [1, 0]]) / 2
    sy = np.array([[0, -1j], [1j, 0]]) / 2
    sz = np.diag([0.5, -0.5])
    dim = 2**L
    out = np.zeros((dim, dim), dtype=complex)
    for a in (sx, sy, sz):
        tot = np.zeros((dim, dim), dtype=complex)
        for j in range(L):
            tot += np.kron(np.kron(np.eye(2**j), a), np.eye(2 ** (L - j - 1)))
        out += tot @ tot
    return out
