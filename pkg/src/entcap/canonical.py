"""Two-qubit Hamiltonians: Pauli coefficients, canonical form, named interactions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .qmath import PAULIS, SIGMA_X, SIGMA_Y, SIGMA_Z, kron, require_hermitian

PAULI_LABELS = "ixyz"

XX = kron(SIGMA_X, SIGMA_X)
YY = kron(SIGMA_Y, SIGMA_Y)
ZZ = kron(SIGMA_Z, SIGMA_Z)


def pauli_basis() -> np.ndarray:
    """Array of shape (4, 4, 4, 4) with [i, j] = sigma_i (x) sigma_j."""
    return np.array([[kron(a, b) for b in PAULIS] for a in PAULIS])


def pauli_coefficients(h) -> np.ndarray:
    h = require_hermitian(h, (4, 4))
    return np.einsum("ijab,ba->ij", pauli_basis(), h).real / 4


def from_pauli_coefficients(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (4, 4):
        raise ValueError(f"Pauli coefficient array must be 4x4, got {coeffs.shape}")
    return np.einsum("ij,ijab->ab", coeffs, pauli_basis())


def su2_from_rotation(rot: np.ndarray) -> np.ndarray:
    """Lift R in SO(3) to u in SU(2) with u sigma_k u^dag = sum_i R[i, k] sigma_i."""
    rotvec = Rotation.from_matrix(rot).as_rotvec()
    angle = np.linalg.norm(rotvec)
    if angle < 1e-15:
        return np.eye(2, dtype=complex)
    n = rotvec / angle
    n_sigma = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * n_sigma


@dataclass(frozen=True)
class CanonicalForm:
    mu_x: float
    mu_y: float
    mu_z: float
    local_a: np.ndarray
    local_b: np.ndarray
    # single-body part: h_a (x) I + I (x) h_b
    local_offset: tuple[np.ndarray, np.ndarray]

    @property
    def mus(self) -> tuple[float, float, float]:
        return (self.mu_x, self.mu_y, self.mu_z)

    def coupling(self) -> np.ndarray:
        return self.mu_x * XX + self.mu_y * YY + self.mu_z * ZZ

    def reconstruct(self) -> np.ndarray:
        w = kron(self.local_a, self.local_b)
        h_a, h_b = self.local_offset
        return (
            w @ self.coupling() @ w.conj().T
            + kron(h_a, np.eye(2))
            + kron(np.eye(2), h_b)
        )


def canonical_form(h) -> CanonicalForm:
    """Decompose ``h`` as (u (x) v) K (u (x) v)^dag plus single-body terms.

    The 3x3 coupling block is factored by SVD into proper rotations; a
    negative overall determinant is absorbed into mu_z.
    """
    c = pauli_coefficients(h)
    block = c[1:, 1:]
    p, s, qt = np.linalg.svd(block)
    q = qt.T
    d = s.copy()
    if np.linalg.det(p) < 0:
        p[:, 2] *= -1
        d[2] *= -1
    if np.linalg.det(q) < 0:
        q[:, 2] *= -1
        d[2] *= -1
    # block == p @ diag(d) @ q.T with p, q in SO(3)
    h_a = c[0, 0] * PAULIS[0] + sum(c[i, 0] * PAULIS[i] for i in range(1, 4))
    h_b = sum(c[0, j] * PAULIS[j] for j in range(1, 4))
    return CanonicalForm(
        mu_x=float(d[0]),
        mu_y=float(d[1]),
        mu_z=float(d[2]),
        local_a=su2_from_rotation(p),
        local_b=su2_from_rotation(q),
        local_offset=(np.asarray(h_a, dtype=complex), np.asarray(h_b, dtype=complex)),
    )


@dataclass(frozen=True)
class NamedInteraction:
    tag: str
    params: dict
    matrix: np.ndarray


TAGS = ("K_xy", "K_xx", "K_prime", "K_mu_xy", "isotropic_heisenberg")


def build(tag: str, **params) -> NamedInteraction:
    """Construct one of the named interaction Hamiltonians.

    ``K_xy`` takes ``mu_x >= mu_y >= 0``; ``K_prime`` takes ``mu_sum``
    (the sum mu_x + mu_y); ``K_mu_xy`` takes ``mu_xy``.
    """
    if tag == "K_xy":
        mu_x, mu_y = float(params["mu_x"]), float(params["mu_y"])
        if not mu_x >= mu_y >= 0:
            raise ValueError(f"K_xy needs mu_x >= mu_y >= 0, got ({mu_x}, {mu_y})")
        mat = mu_x * XX + mu_y * YY
    elif tag == "K_xx":
        mat = XX.copy()
    elif tag == "K_prime":
        mat = float(params["mu_sum"]) * XX
    elif tag == "K_mu_xy":
        mu = float(params["mu_xy"])
        mat = mu * (XX + YY) + ZZ
    elif tag == "isotropic_heisenberg":
        mat = XX + YY + ZZ
    else:
        raise ValueError(f"unknown interaction tag {tag!r}; expected one of {TAGS}")
    return NamedInteraction(tag, dict(params), mat)


def as_matrix(h) -> np.ndarray:
    """Accept a NamedInteraction or a raw 4x4 array."""
    if isinstance(h, NamedInteraction):
        return h.matrix
    return np.asarray(h, dtype=complex)
