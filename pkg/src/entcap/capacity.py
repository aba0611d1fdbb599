"""Entanglement generation rate, its closed form, and ancilla-assisted optimization."""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize, minimize_scalar

from .canonical import CanonicalForm, as_matrix, canonical_form
from .qmath import (
    SCHMIDT_CUTOFF,
    SIGMA_X,
    PureState,
    apply_local_ab,
    require_hermitian,
)

DIVERGENCE_RATE_TOL = 1e-9


def _alpha_objective(x):
    return 2.0 * np.sqrt(x * (1.0 - x)) * np.log2(x / (1.0 - x))


@dataclass(frozen=True)
class Constants:
    alpha: float
    x0: float


@functools.lru_cache(maxsize=None)
def constants() -> Constants:
    """Maximize 2 sqrt(x(1-x)) log2(x/(1-x)) over (1/2, 1)."""
    res = minimize_scalar(
        lambda x: -_alpha_objective(x),
        bounds=(0.5, 1.0 - 1e-12),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return Constants(alpha=float(_alpha_objective(res.x)), x0=float(res.x))


def psi_max() -> PureState:
    x0 = constants().x0
    vec = np.zeros(4, dtype=complex)
    vec[0b01] = np.sqrt(x0)
    vec[0b10] = -1j * np.sqrt(1.0 - x0)
    return PureState((2, 1, 2, 1), vec)


def single_shot_no_ancilla(cf: CanonicalForm) -> float:
    return constants().alpha * (cf.mu_x + cf.mu_y)


def drho_dt(state: PureState, h) -> np.ndarray:
    """d/dt of the AA' reduced state at t = 0 under exp(-i h t)."""
    h = require_hermitian(as_matrix(h), (4, 4))
    psi = state.matrix()
    phi = apply_local_ab(h, state).reshape(psi.shape)
    return -1j * (phi @ psi.conj().T - psi @ phi.conj().T)


@dataclass(frozen=True)
class RateResult:
    value: float
    divergent: bool
    schmidt_spectrum: np.ndarray


def _rate_core(psi: np.ndarray, phi: np.ndarray):
    """Batched rate on (..., dA, dB) amplitude matrices ``psi`` and ``phi = H psi``.

    Returns -tr(rho' log rho), a divergence mask, the eigenvalues of rho, and
    the value with flagged terms dropped.
    Eigenvalues below the Schmidt cutoff contribute nothing unless their
    diagonal rate exceeds ``DIVERGENCE_RATE_TOL``; then the value is +inf
    for inflow and -inf for outflow.
    """
    psi_h = np.conj(np.swapaxes(psi, -1, -2))
    rho = psi @ psi_h
    drho = -1j * (phi @ psi_h - psi @ np.conj(np.swapaxes(phi, -1, -2)))
    lam, vecs = np.linalg.eigh(rho)
    diag = np.einsum("...ji,...jk,...ki->...i", vecs.conj(), drho, vecs).real
    support = lam > SCHMIDT_CUTOFF
    logs = np.log2(np.where(support, lam, 1.0))
    regular = -np.sum(np.where(support, diag * logs, 0.0), axis=-1)
    flagged = ~support & (np.abs(diag) > DIVERGENCE_RATE_TOL)
    divergent = np.any(flagged, axis=-1)
    inflow = np.any(flagged & (diag > 0), axis=-1)
    value = np.where(divergent, np.where(inflow, np.inf, -np.inf), regular)
    return value, divergent, lam, regular


def rate(state: PureState, h) -> RateResult:
    """Instantaneous entanglement rate dE/dt (bits per unit time) under ``h``.

    A rate that moves population of an (numerically) empty Schmidt level is
    reported as ``divergent = True`` with an infinite ``value``.
    """
    h = require_hermitian(as_matrix(h), (4, 4))
    psi = state.matrix()
    phi = apply_local_ab(h, state).reshape(psi.shape)
    value, divergent, lam, _ = _rate_core(psi, phi)
    spectrum = np.sort(lam[lam > SCHMIDT_CUTOFF])[::-1]
    return RateResult(value=float(value), divergent=bool(divergent), schmidt_spectrum=spectrum)


# ---------------------------------------------------------------------------
# optimizer


@dataclass
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 400
    tol: float = 1e-9
    seed: int = 0
    ancilla_a: int = 1
    ancilla_b: int = 1
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.ancilla_a < 1 or self.ancilla_b < 1:
            raise ValueError("ancilla dimensions must be >= 1")


@dataclass
class OptimizationResult:
    best_rate: float
    best_state: PureState
    restarts: int
    evaluations: int
    converged: bool
    history: list = field(default_factory=list)
    best_restart: int = 0


class _SphereObjective:
    """Rate as a function of 2N real parameters, normalized onto the unit sphere."""

    def __init__(self, h: np.ndarray, dims, fd_step: float):
        self.dims = tuple(dims)
        self.n = int(np.prod(dims))
        self.h4 = h.reshape(2, 2, 2, 2)
        self.shape = (dims[0] * dims[1], dims[2] * dims[3])
        self.fd_step = fd_step
        self.evaluations = 0

    def vectors(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(z)
        vec = z[:, : self.n] + 1j * z[:, self.n :]
        return vec / np.linalg.norm(vec, axis=1, keepdims=True)

    def batch(self, z: np.ndarray):
        vec = self.vectors(z)
        b = vec.shape[0]
        t = vec.reshape((b,) + self.dims)
        phi = np.einsum("abcd,ncxdy->naxby", self.h4, t)
        self.evaluations += b
        value, divergent, _, regular = _rate_core(
            vec.reshape((b,) + self.shape), phi.reshape((b,) + self.shape)
        )
        return value, divergent, regular

    def value(self, z: np.ndarray, rng: np.random.Generator) -> float:
        value, divergent, _ = self.batch(z)
        if not divergent[0]:
            return float(value[0])
        # believe a divergence only if three shrinking perturbations agree
        for eps in (1e-6, 1e-7, 1e-8):
            v, d, _ = self.batch(z + eps * rng.normal(size=z.shape))
            if not d[0]:
                return float(v[0])
        return float(value[0])

    def gradient(self, z: np.ndarray) -> np.ndarray:
        m = z.size
        step = self.fd_step * np.eye(m)
        _, _, regular = self.batch(np.vstack([z + step, z - step]))
        return (regular[:m] - regular[m:]) / (2 * self.fd_step)


def _local_search(obj: _SphereObjective, z0: np.ndarray, config: OptimizerConfig, rng):
    trace = []

    def fun(z):
        return -obj.value(z, rng)

    def jac(z):
        return -obj.gradient(z)

    def callback(intermediate_result):
        trace.append(-intermediate_result.fun)

    res = minimize(
        fun,
        z0,
        jac=jac,
        method="BFGS",
        callback=callback,
        options={"maxiter": config.max_iters, "gtol": 1e-8},
    )
    z = res.x / np.linalg.norm(res.x)
    last_change = abs(trace[-1] - trace[-2]) if len(trace) >= 2 else math.inf
    return z, bool(res.success or last_change < config.tol)


def optimize_rate(h, ancilla_dims=None, config: OptimizerConfig | None = None) -> OptimizationResult:
    """Multistart search for the largest entanglement rate of ``h``.

    States on A A' B B' are parameterized by 2 * (2 dA') * (2 dB') reals
    normalized to the sphere. Each restart draws its own seed from the
    config seed, so the result does not depend on restart execution order.
    """
    config = config or OptimizerConfig()
    if ancilla_dims is None:
        ancilla_dims = (config.ancilla_a, config.ancilla_b)
    da, db = (int(d) for d in ancilla_dims)
    if da < 1 or db < 1:
        raise ValueError(f"ancilla dimensions must be >= 1, got {ancilla_dims}")
    h = require_hermitian(as_matrix(h), (4, 4))
    dims = (2, da, 2, db)
    obj = _SphereObjective(h, dims, config.fd_step)

    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    history, states, flags = [], [], []
    for seq in seeds:
        rng = np.random.default_rng(seq)
        while True:
            z0 = rng.normal(size=2 * obj.n)
            z0 /= np.linalg.norm(z0)
            if not obj.batch(z0)[1][0]:
                break
        z, conv = _local_search(obj, z0, config, rng)
        state = PureState(dims, obj.vectors(z)[0])
        history.append(rate(state, h).value)
        states.append(state)
        flags.append(conv)

    best = int(np.argmax(history))  # first index wins ties
    return OptimizationResult(
        best_rate=float(history[best]),
        best_state=states[best],
        restarts=config.restarts,
        evaluations=obj.evaluations,
        converged=flags[best],
        history=[float(v) for v in history],
        best_restart=best,
    )


# ---------------------------------------------------------------------------
# upper-bound chain


def m_matrix(lambdas) -> np.ndarray:
    """M_ij = sqrt(l_i l_j) log2(l_j / l_i), zero where l_i l_j = 0."""
    lam = np.asarray(lambdas, dtype=float)
    prod = np.outer(lam, lam)
    ok = prod > 0
    safe = np.where(lam > 0, lam, 1.0)
    logs = np.log2(safe)
    m = np.sqrt(np.where(ok, prod, 0.0)) * (logs[None, :] - logs[:, None])
    m = np.where(ok, m, 0.0)
    return (m - m.T) / 2  # exact skew-symmetry


@dataclass
class BoundCheckReport:
    # [i tr(M (X_U o X_V)), tr(|M| |X_U o X_V|), max_P tr(|M| P), alpha]
    m_abs_trace_terms: list
    substochastic_ok: bool
    permutation_max: float
    alpha_bound_ok: bool
    chain_ok: bool
    m_entry_bound_ok: bool
    max_row_sum: float
    max_col_sum: float

    @property
    def ok(self) -> bool:
        return (
            self.substochastic_ok
            and self.alpha_bound_ok
            and self.chain_ok
            and self.m_entry_bound_ok
        )

    @property
    def min_slack(self) -> float:
        t = self.m_abs_trace_terms
        return float(min(t[k + 1] - t[k] for k in range(len(t) - 1)))


def _require_unitary(u, n, name):
    u = np.asarray(u, dtype=complex)
    if u.shape != (n, n):
        raise ValueError(f"{name} must be {n}x{n}, got {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(n))) > 1e-10:
        raise ValueError(f"{name} is not unitary")
    return u


def permutation_max(abs_m: np.ndarray, rng=None, samples: int = 10_000) -> tuple[float, float]:
    """Return (max over permutations of tr(|M| P), max over the checked set).

    Exhaustive for n <= 6. Beyond that the checked set is ``samples`` random
    permutations and the maximum comes from an assignment solver.
    """
    n = abs_m.shape[0]
    if n <= 6:
        perms = np.array(list(itertools.permutations(range(n))))
        vals = abs_m[np.arange(n), perms].sum(axis=1)
        best = float(vals.max())
        return best, best
    rng = np.random.default_rng(rng)
    perms = np.array([rng.permutation(n) for _ in range(samples)])
    sampled = float(abs_m[np.arange(n), perms].sum(axis=1).max())
    rows, cols = linear_sum_assignment(abs_m, maximize=True)
    return float(abs_m[rows, cols].sum()), sampled


def verify_bound_chain(u, v, lambdas, x=None, tol: float = 1e-10, rng=None) -> BoundCheckReport:
    """Evaluate each step of the Hadamard-product bound on the K_xx rate.

    ``u`` and ``v`` are the Schmidt frames of the A and B sides; ``x`` defaults
    to sigma_x (x) I on a qubit times a (n/2)-dimensional ancilla.
    """
    lam = np.asarray(lambdas, dtype=float)
    n = lam.size
    u = _require_unitary(u, n, "u")
    v = _require_unitary(v, n, "v")
    if x is None:
        if n % 2:
            raise ValueError("default X = sigma_x (x) I needs an even dimension")
        x = np.kron(SIGMA_X, np.eye(n // 2))
    alpha = constants().alpha

    xu = u.conj().T @ x @ u
    xv = v.conj().T @ x @ v
    w = xu * xv
    m = m_matrix(lam)
    abs_m, abs_w = np.abs(m), np.abs(w)

    first = float((1j * np.trace(m @ w)).real)
    second = float(np.trace(abs_m @ abs_w))
    perm_best, perm_checked = permutation_max(abs_m, rng)
    terms = [first, second, perm_best, alpha]

    row, col = abs_w.sum(axis=1).max(), abs_w.sum(axis=0).max()
    pair_bound = (lam[:, None] + lam[None, :]) * alpha / 2
    return BoundCheckReport(
        m_abs_trace_terms=terms,
        substochastic_ok=bool(row <= 1 + tol and col <= 1 + tol),
        permutation_max=perm_best,
        alpha_bound_ok=bool(max(perm_best, perm_checked) <= alpha + tol),
        chain_ok=all(terms[k] <= terms[k + 1] + tol for k in range(3)),
        m_entry_bound_ok=bool(np.all(abs_m <= pair_bound + 1e-12)),
        max_row_sum=float(row),
        max_col_sum=float(col),
    )


def schmidt_frames(state: PureState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(U, V, lambdas) with full unitary frames, padding the spectrum with zeros."""
    psi = state.matrix()
    if psi.shape[0] != psi.shape[1]:
        raise ValueError("Schmidt frames need equal A-side and B-side dimensions")
    u, s, vh = np.linalg.svd(psi)
    return u, vh.T, s**2


def closed_form_capacity(h) -> float:
    """alpha (mu_x + mu_y) of the canonical form of ``h``."""
    return single_shot_no_ancilla(canonical_form(as_matrix(h)))

