import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entcap.canonical import XX, YY, ZZ, build, canonical_form
from entcap.capacity import (
    OptimizerConfig,
    constants,
    drho_dt,
    m_matrix,
    optimize_rate,
    permutation_max,
    psi_max,
    rate,
    schmidt_frames,
    single_shot_no_ancilla,
    verify_bound_chain,
)
from entcap.qmath import (
    PureState,
    entanglement_entropy,
    evolve,
    kron,
    partial_trace_B,
    random_hermitian,
    random_state,
    random_unitary,
)

seeds = st.integers(0, 2**32 - 1)
DIMS = st.sampled_from([(2, 1, 2, 1), (2, 2, 2, 2), (2, 2, 2, 1), (2, 1, 2, 3)])
ALPHA = constants().alpha


def alpha_objective(x):
    return 2 * math.sqrt(x * (1 - x)) * math.log2(x / (1 - x))


def test_constants_match_reported_values():
    c = constants()
    assert c.alpha == pytest.approx(1.9123, abs=5e-4)
    assert c.x0 == pytest.approx(0.9168, abs=5e-4)
    assert alpha_objective(0.5) == 0


def test_constants_invariants():
    c = constants()
    assert c.alpha == pytest.approx(alpha_objective(c.x0), abs=1e-9)
    h = 1e-6
    deriv = (alpha_objective(c.x0 + h) - alpha_objective(c.x0 - h)) / (2 * h)
    assert abs(deriv) < 1e-7
    # independent dense-grid oracle
    grid = np.linspace(0.5 + 1e-7, 1 - 1e-7, 2_000_001)
    vals = 2 * np.sqrt(grid * (1 - grid)) * np.log2(grid / (1 - grid))
    assert c.alpha >= vals.max() - 1e-12
    assert c.x0 == pytest.approx(grid[vals.argmax()], abs=1e-5)


def test_psi_max():
    s = psi_max()
    x0 = constants().x0
    assert np.linalg.norm(s.amplitudes) == pytest.approx(1)
    assert s.dims == (2, 1, 2, 1)
    assert entanglement_entropy(s) == pytest.approx(
        -x0 * math.log2(x0) - (1 - x0) * math.log2(1 - x0), abs=1e-13
    )
    assert rate(s, XX).value == pytest.approx(ALPHA, abs=1e-12)
    assert rate(s, build("K_xx")).value == pytest.approx(ALPHA, abs=1e-12)


def rho_at(state, h, t):
    return partial_trace_B(evolve(state, h, t))


def test_drho_dt_examples(rng):
    s00 = PureState((2, 1, 2, 1), [1, 0, 0, 0])
    assert np.allclose(drho_dt(s00, ZZ), 0)
    bell = PureState.from_vector([1, 0, 0, 1])
    d = 1e-6
    fd = (rho_at(bell, XX, d) - rho_at(bell, XX, -d)) / (2 * d)
    assert np.allclose(drho_dt(bell, XX), fd, atol=1e-8)
    s = random_state((2, 2, 2, 2), rng)
    h = random_hermitian(4, rng)
    fd = (rho_at(s, h, d) - rho_at(s, h, -d)) / (2 * d)
    assert np.max(np.abs(drho_dt(s, h) - fd)) < 1e-8


@given(DIMS, seeds)
def test_drho_dt_hermitian_traceless(dims, seed):
    rng = np.random.default_rng(seed)
    d = drho_dt(random_state(dims, rng), random_hermitian(4, rng))
    assert np.max(np.abs(d - d.conj().T)) < 1e-10
    assert abs(np.trace(d)) < 1e-10


def test_rate_examples(rng):
    bell = PureState.from_vector([1, 0, 0, 1])
    assert rate(bell, XX).value == pytest.approx(0, abs=1e-12)
    for _ in range(5):
        s = random_state((2, 1, 2, 1), rng)
        h = build("K_xy", mu_x=1.0, mu_y=0.4).matrix
        d = 1e-5
        fd = (entanglement_entropy(evolve(s, h, d)) - entanglement_entropy(evolve(s, h, -d))) / (2 * d)
        assert rate(s, h).value == pytest.approx(fd, abs=1e-4)


@given(DIMS, seeds)
def test_rate_matches_entropy_finite_difference(dims, seed):
    rng = np.random.default_rng(seed)
    s = random_state(dims, rng)
    h = random_hermitian(4, rng)
    r = rate(s, h)
    d = 1e-5
    fd = (entanglement_entropy(evolve(s, h, d)) - entanglement_entropy(evolve(s, h, -d))) / (2 * d)
    assert not r.divergent
    assert abs(r.value - fd) <= max(1e-4, 1e-3 * abs(r.value))


@given(DIMS, seeds, st.floats(0.01, 10))
def test_rate_scaling_and_local_covariance(dims, seed, c):
    rng = np.random.default_rng(seed)
    s = random_state(dims, rng)
    h = random_hermitian(4, rng)
    base = rate(s, h).value
    assert rate(s, c * h).value == pytest.approx(c * base, rel=1e-9, abs=1e-9)
    # local unitaries on A, B qubits and on the ancillas; h conjugated on the qubits
    ua, ub = random_unitary(2, rng), random_unitary(2, rng)
    va, vb = random_unitary(dims[1], rng), random_unitary(dims[3], rng)
    t = np.einsum("ai,bj,ck,dl,ijkl->abcd", ua, va, ub, vb, s.tensor())
    moved = PureState(dims, t.reshape(-1))
    w = kron(ua, ub)
    assert rate(moved, w @ h @ w.conj().T).value == pytest.approx(base, abs=1e-9)


def test_rank_deficient_states_are_finite():
    # product state and unbalanced ancillas have empty Schmidt levels
    s = PureState((2, 1, 2, 1), [1, 0, 0, 0])
    r = rate(s, XX)
    assert not r.divergent and r.value == 0
    assert list(r.schmidt_spectrum) == [1]


def test_divergence_flag():
    # population flowing into a Schmidt level below the cutoff
    eps = 1e-13
    s = PureState((2, 1, 2, 1), [math.sqrt(1 - eps), 0, 0, -1j * math.sqrt(eps)])
    r = rate(s, XX)
    assert r.divergent and r.value == math.inf
    # opposite phase drains the level instead
    s = PureState((2, 1, 2, 1), [math.sqrt(1 - eps), 0, 0, 1j * math.sqrt(eps)])
    r = rate(s, XX)
    assert r.divergent and r.value == -math.inf


def test_single_shot_no_ancilla():
    assert single_shot_no_ancilla(canonical_form(ZZ)) == pytest.approx(1.9123, abs=5e-4)
    assert single_shot_no_ancilla(canonical_form(XX + YY)) == pytest.approx(3.8247, abs=5e-4)
    assert single_shot_no_ancilla(canonical_form(np.zeros((4, 4)))) == 0


def test_optimize_k_xx():
    cfg = OptimizerConfig(restarts=8, seed=1)
    for anc in [(1, 1), (2, 2)]:
        res = optimize_rate(XX, anc, cfg)
        assert abs(res.best_rate - ALPHA) < 1e-3
        assert res.best_rate <= ALPHA + 1e-3
        assert res.best_rate == pytest.approx(rate(res.best_state, XX).value, abs=1e-8)
        assert res.best_state.dims == (2, anc[0], 2, anc[1])
        assert len(res.history) == 8 and res.restarts == 8
        assert res.evaluations > 0


def test_optimize_isotropic_heisenberg_gains_from_ancillas():
    cfg = OptimizerConfig(restarts=8, seed=2)
    h = build("isotropic_heisenberg").matrix
    without = optimize_rate(h, (1, 1), cfg).best_rate
    with_anc = optimize_rate(h, (2, 2), cfg).best_rate
    assert without == pytest.approx(2 * ALPHA, abs=1e-3)
    assert with_anc > without + 1e-3


def test_optimize_is_deterministic():
    cfg = OptimizerConfig(restarts=4, seed=7)
    h = random_hermitian(4, 3)
    a = optimize_rate(h, (2, 1), cfg)
    b = optimize_rate(h, (2, 1), cfg)
    assert a.best_rate == b.best_rate and a.history == b.history
    assert np.array_equal(a.best_state.amplitudes, b.best_state.amplitudes)
    # the restarts do not depend on how many follow them
    c = optimize_rate(h, (2, 1), OptimizerConfig(restarts=2, seed=7))
    assert c.history == a.history[:2]


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        optimize_rate(XX, (0, 1))


def test_m_matrix_examples(rng):
    assert np.array_equal(m_matrix(np.full(4, 0.25)), np.zeros((4, 4)))
    x0 = constants().x0
    m = m_matrix([x0, 1 - x0])
    assert m[0, 1] == pytest.approx(-ALPHA / 2, abs=1e-12)
    assert m[1, 0] == pytest.approx(ALPHA / 2, abs=1e-12)
    m = m_matrix([0.5, 0.5, 0.0])
    assert np.all(m[2] == 0) and np.all(m[:, 2] == 0)


@given(st.integers(2, 10), seeds)
def test_m_matrix_properties(n, seed):
    lam = np.random.default_rng(seed).dirichlet(np.ones(n))
    m = m_matrix(lam)
    assert np.array_equal(m + m.T, np.zeros((n, n)))
    assert np.all(np.abs(m) <= (lam[:, None] + lam[None, :]) * ALPHA / 2 + 1e-12)


@given(st.integers(1, 8), seeds)
def test_hadamard_of_unitaries_is_substochastic(d, seed):
    rng = np.random.default_rng(seed)
    w = np.abs(random_unitary(d, rng) * random_unitary(d, rng))
    assert w.sum(axis=0).max() <= 1 + 1e-12
    assert w.sum(axis=1).max() <= 1 + 1e-12


def test_bound_chain_identity_frames():
    lam = np.array([0.4, 0.3, 0.2, 0.1])
    rep = verify_bound_chain(np.eye(4), np.eye(4), lam)
    x = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))
    assert rep.substochastic_ok and rep.max_row_sum <= 1 + 1e-12
    assert rep.m_abs_trace_terms[0] == pytest.approx(0, abs=1e-15)  # X o X is real
    assert np.allclose(np.abs(x * x).sum(axis=1), 1)
    assert rep.ok


def test_bound_chain_random(rng):
    for _ in range(50):
        u, v = random_unitary(4, rng), random_unitary(4, rng)
        rep = verify_bound_chain(u, v, rng.dirichlet(np.ones(4)))
        assert rep.substochastic_ok and rep.alpha_bound_ok and rep.chain_ok
        t = rep.m_abs_trace_terms
        assert all(t[k] <= t[k + 1] + 1e-10 for k in range(3))


def test_bound_chain_first_term_is_the_rate(rng):
    """The Hadamard-product form reproduces the direct K_xx rate."""
    for _ in range(20):
        u, v = random_unitary(4, rng), random_unitary(4, rng)
        lam = rng.dirichlet(np.ones(4))
        psi = (u * np.sqrt(lam)) @ v.T
        s = PureState((2, 2, 2, 2), psi.reshape(-1))
        first = verify_bound_chain(u, v, lam).m_abs_trace_terms[0]
        assert first == pytest.approx(rate(s, XX).value, abs=1e-10)


def test_bound_chain_saturates_at_psi_max():
    u, v, lam = schmidt_frames(psi_max())
    rep = verify_bound_chain(u, v, lam)
    assert all(abs(t - ALPHA) < 1e-6 for t in rep.m_abs_trace_terms)


def test_bound_chain_rejects_bad_input():
    with pytest.raises(ValueError):
        verify_bound_chain(np.ones((4, 4)), np.eye(4), np.full(4, 0.25))
    with pytest.raises(ValueError):
        verify_bound_chain(np.eye(3), np.eye(3), np.full(3, 1 / 3))


def test_permutation_max(rng):
    for n in range(1, 7):
        a = rng.random((n, n))
        brute = max(sum(a[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))
        assert permutation_max(a)[0] == pytest.approx(brute)
    a = rng.random((8, 8))
    exact, sampled = permutation_max(a, rng)
    assert sampled <= exact + 1e-12
