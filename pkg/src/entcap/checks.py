"""Randomized property suites behind ``entcap verify``.

Each check records pass/fail counts and the worst margin seen, where a
margin is tolerance minus error (negative means a failure).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import canonical_form
from .capacity import constants, m_matrix, rate, verify_bound_chain
from .qmath import (
    PureState,
    entanglement_entropy,
    evolve,
    kron,
    partial_trace_product,
    random_hermitian,
    random_state,
    random_unitary,
    schmidt,
    vectorization_identity_check,
)

STATE_DIMS = ((2, 1, 2, 1), (2, 2, 2, 2), (2, 2, 2, 1), (2, 1, 2, 3))


@dataclass
class CheckTally:
    passed: int = 0
    failed: int = 0
    worst_margin: float = float("inf")

    def record(self, margin: float) -> None:
        margin = float(margin)
        if margin >= 0:
            self.passed += 1
        else:
            self.failed += 1
        self.worst_margin = min(self.worst_margin, margin)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "failed": self.failed, "worst_margin": self.worst_margin}


def _complex_matrix(d, rng):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def rate_fd_error(state: PureState, h, dt: float = 1e-5):
    """(rate, central-difference estimate, tolerance)."""
    r = rate(state, h)
    fd = (entanglement_entropy(evolve(state, h, dt)) - entanglement_entropy(evolve(state, h, -dt))) / (2 * dt)
    return r, fd, max(1e-4, 1e-3 * abs(fd))


def bounds_suite(trials: int, rng) -> dict:
    alpha = constants().alpha
    chain, substoch, m_bound = CheckTally(), CheckTally(), CheckTally()
    for _ in range(trials):
        u, v = random_unitary(4, rng), random_unitary(4, rng)
        lam = rng.dirichlet(np.ones(4))
        rep = verify_bound_chain(u, v, lam)
        t = rep.m_abs_trace_terms
        chain.record(min(t[k + 1] - t[k] for k in range(3)) + 1e-10)

        d = int(rng.integers(1, 9))
        a, b = random_unitary(d, rng), random_unitary(d, rng)
        w = np.abs(a * b)
        substoch.record(1 + 1e-12 - max(w.sum(axis=0).max(), w.sum(axis=1).max()))

        lam = rng.dirichlet(np.ones(int(rng.integers(2, 9))))
        bound = (lam[:, None] + lam[None, :]) * alpha / 2
        m_bound.record(np.min(bound + 1e-12 - np.abs(m_matrix(lam))))
    return {
        "bound_chain": chain.as_dict(),
        "substochastic": substoch.as_dict(),
        "m_entry_bound": m_bound.as_dict(),
    }


def identities_suite(trials: int, rng) -> dict:
    vec_id, ptrace_id, round_trip = CheckTally(), CheckTally(), CheckTally()
    lu_entropy, lu_canonical, rate_fd = CheckTally(), CheckTally(), CheckTally()
    for k in range(trials):
        m = _complex_matrix(4, rng)
        vec_id.record(1.0 if vectorization_identity_check(m) else -1.0)

        m1, m2 = _complex_matrix(4, rng), _complex_matrix(4, rng)
        err = np.max(np.abs(partial_trace_product(m1, m2) - m1 @ m2))
        ptrace_id.record(1e-10 * max(1.0, np.max(np.abs(m1 @ m2))) - err)

        dims = STATE_DIMS[k % len(STATE_DIMS)]
        s = random_state(dims, rng)
        rec = schmidt(s).reconstruct()
        phase = np.vdot(rec, s.amplitudes)
        phase = phase / abs(phase)
        round_trip.record(1e-8 - np.max(np.abs(rec * phase - s.amplitudes)))

        ua = random_unitary(s.dim_a, rng)
        vb = random_unitary(s.dim_b, rng)
        moved = PureState(dims, (ua @ s.matrix() @ vb.T).reshape(-1))
        lu_entropy.record(1e-9 - abs(entanglement_entropy(moved) - entanglement_entropy(s)))

        h = random_hermitian(4, rng)
        w = kron(random_unitary(2, rng), random_unitary(2, rng))
        c1 = np.array(canonical_form(h).mus)
        c2 = np.array(canonical_form(w @ h @ w.conj().T).mus)
        lu_canonical.record(1e-9 - np.max(np.abs(c1 - c2)))

        r, fd, tol = rate_fd_error(s, h)
        if not r.divergent:
            rate_fd.record(tol - abs(r.value - fd))
    return {
        "vectorization_identity": vec_id.as_dict(),
        "partial_trace_product": ptrace_id.as_dict(),
        "schmidt_round_trip": round_trip.as_dict(),
        "local_unitary_entropy": lu_entropy.as_dict(),
        "local_unitary_canonical": lu_canonical.as_dict(),
        "rate_vs_finite_difference": rate_fd.as_dict(),
    }


SUITES = {"bounds": bounds_suite, "identities": identities_suite}


def run_suites(suite: str, trials: int, seed: int = 0) -> dict:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    names = list(SUITES) if suite == "all" else [suite]
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {suite!r}; expected bounds, identities or all")
    rng = np.random.default_rng(seed)
    checks = {}
    for name in names:
        checks.update(SUITES[name](trials, rng))
    return {
        "suite": suite,
        "trials": trials,
        "checks": checks,
        "all_passed": all(c["failed"] == 0 for c in checks.values()),
    }
