"""Dense linear algebra for bipartite pure states.

States live on A (x) A' (x) B (x) B' with tensor index order (A, A', B, B').
The A-side of the cut is AA', the B-side is BB'. Operators are plain
complex ``numpy`` arrays; entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)

NORM_TOL = 1e-10
SCHMIDT_CUTOFF = 1e-12
EIG_CLAMP = 1e-10


@dataclass(frozen=True)
class PureState:
    """Unit vector with declared factor dimensions (dA, dA', dB, dB')."""

    dims: tuple[int, int, int, int]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 4 or min(dims) < 1:
            raise ValueError(f"dims must be four positive integers, got {self.dims}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise ValueError(
                f"amplitudes has length {amps.size}, dims {dims} need {int(np.prod(dims))}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, dims=(2, 1, 2, 1)) -> "PureState":
        """Build a state from an unnormalized vector."""
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(dims, vec / np.linalg.norm(vec))

    @property
    def dim_a(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def dim_b(self) -> int:
        return self.dims[2] * self.dims[3]

    def matrix(self) -> np.ndarray:
        """Amplitudes reshaped to a (dA dA') x (dB dB') matrix."""
        return self.amplitudes.reshape(self.dim_a, self.dim_b)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True)
class SchmidtDecomposition:
    lambdas: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return sum_i sqrt(lambda_i) |phi_i> (x) |eta_i> as a flat vector."""
        mat = (self.left_vectors * np.sqrt(self.lambdas)) @ self.right_vectors.T
        return mat.reshape(-1)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(a, tol: float = 1e-12) -> bool:
    """Hermiticity test relative to the largest entry."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol * scale)


def require_hermitian(h, shape=None, tol: float = 1e-12, name: str = "h") -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if shape is not None and h.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {h.shape}")
    if not is_hermitian(h, tol):
        raise ValueError(f"{name} is not Hermitian")
    return h


def partial_trace_B(state: PureState) -> np.ndarray:
    """Reduced density matrix on AA'."""
    psi = state.matrix()
    return psi @ psi.conj().T


def partial_trace_A(state: PureState) -> np.ndarray:
    """Reduced density matrix on BB'."""
    psi = state.matrix()
    return psi.T @ psi.conj()


def schmidt(state: PureState) -> SchmidtDecomposition:
    u, s, vh = np.linalg.svd(state.matrix(), full_matrices=False)
    lam = s**2
    keep = lam > SCHMIDT_CUTOFF
    return SchmidtDecomposition(lam[keep], u[:, keep], vh[keep].T)


def _shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def entanglement_entropy(state: PureState) -> float:
    return _shannon_bits(schmidt(state).lambdas)


def von_neumann_entropy(rho, tol: float = 1e-8) -> float:
    """Entropy in bits of a density matrix.

    Eigenvalues in [-1e-10, 0] are treated as zero; anything more negative,
    a non-Hermitian input, or a trace away from one raises ``ValueError``.
    """
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho, 1e-10):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix has trace {tr!r}, expected 1")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -EIG_CLAMP:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min()!r}")
    return _shannon_bits(np.clip(evals, 0.0, None))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy needs 0 <= x <= 1, got {x!r}")
    return _shannon_bits([x, 1.0 - x])


def expm_hermitian(h, t: float) -> np.ndarray:
    """exp(-i h t) via eigendecomposition of the Hermitian ``h``."""
    evals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T


def apply_local_ab(op, state: PureState) -> np.ndarray:
    """Apply a 4x4 operator on the A,B qubits (identity on A'B'); returns the raw tensor."""
    if state.dims[0] != 2 or state.dims[2] != 2:
        raise ValueError(f"operator acts on qubits A and B, state has dims {state.dims}")
    op4 = np.asarray(op, dtype=complex).reshape(2, 2, 2, 2)
    out = np.einsum("abcd,cxdy->axby", op4, state.tensor())
    return out.reshape(-1)


def evolve(state: PureState, h, t: float) -> PureState:
    h = require_hermitian(h, (4, 4))
    return PureState(state.dims, apply_local_ab(expm_hermitian(h, t), state))


def max_entangled(d: int) -> np.ndarray:
    """Unnormalized |Phi> = sum_i |i>|i> on C^d (x) C^d."""
    return np.eye(d, dtype=complex).reshape(-1)


def vectorization_identity_check(m, tol: float = 1e-12) -> bool:
    """Check (I (x) M)|Phi> == (M^T (x) I)|Phi>."""
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    phi = max_entangled(d)
    eye = np.eye(d)
    lhs = np.kron(eye, m) @ phi
    rhs = np.kron(m.T, eye) @ phi
    scale = max(1.0, np.max(np.abs(m)))
    return bool(np.max(np.abs(lhs - rhs)) <= tol * scale)


def partial_trace_product(m1, m2) -> np.ndarray:
    """tr_B[(M1 (x) I)|Phi><Phi|(M2 (x) I)], computed by explicit partial trace."""
    m1 = np.asarray(m1, dtype=complex)
    m2 = np.asarray(m2, dtype=complex)
    d = m1.shape[0]
    phi = max_entangled(d)
    eye = np.eye(d)
    op = np.kron(m1, eye) @ np.outer(phi, phi.conj()) @ np.kron(m2, eye)
    return np.einsum("ijkj->ik", op.reshape(d, d, d, d))


def random_state(dims=(2, 1, 2, 1), rng=None) -> PureState:
    rng = np.random.default_rng(rng)
    n = int(np.prod(dims))
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState.from_vector(vec, dims)


def random_unitary(d: int, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    if d == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def random_hermitian(d: int = 4, rng=None, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(rng)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2
