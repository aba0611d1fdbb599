import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entcap.canonical import XX, build
from entcap.capacity import constants
from entcap.commrate import Ensemble, comm_rate, ensemble_E1, ensemble_E2, holevo
from entcap.qmath import (
    PureState,
    binary_entropy,
    entanglement_entropy,
    partial_trace_A,
    random_hermitian,
    random_state,
    random_unitary,
)

seeds = st.integers(0, 2**32 - 1)
C = constants()


def random_ensemble(rng, dims=(2, 1, 2, 1), k=3):
    probs = rng.dirichlet(np.ones(k))
    return Ensemble(tuple((p, random_state(dims, rng)) for p in probs))


def test_ensemble_validation(rng):
    s = random_state((2, 1, 2, 1), rng)
    with pytest.raises(ValueError):
        Ensemble(((0.5, s), (0.4, s)))
    with pytest.raises(ValueError):
        Ensemble(((1.0, s), (0.0, s)))
    with pytest.raises(ValueError):
        Ensemble(((0.5, s), (0.5, random_state((2, 2, 2, 1), rng))))
    with pytest.raises(ValueError):
        Ensemble(())


def test_holevo_examples(rng):
    s = random_state((2, 1, 2, 1), rng)
    assert holevo(Ensemble(((0.5, s), (0.5, s)))).chi == pytest.approx(0, abs=1e-12)
    s0 = PureState((2, 1, 2, 1), [1, 0, 0, 0])  # Bob |0>
    s1 = PureState((2, 1, 2, 1), [0, 1, 0, 0])  # Bob |1>
    assert holevo(Ensemble(((0.5, s0), (0.5, s1)))).chi == pytest.approx(1, abs=1e-12)
    res = holevo(ensemble_E1())
    assert res.chi == pytest.approx(1 - binary_entropy(C.x0), abs=1e-9)
    assert res.chi == pytest.approx(res.entropy_of_average - res.average_entropy, abs=1e-12)


def test_ensemble_E1():
    e = ensemble_E1()
    assert e.probabilities == [0.5, 0.5]
    avg = sum(p * partial_trace_A(s) for p, s in e.members)
    assert np.allclose(avg, np.eye(2) / 2, atol=1e-14)
    for s in e.states:
        assert entanglement_entropy(s) == pytest.approx(binary_entropy(C.x0), abs=1e-13)
    # second member is the first with Bob's qubit flipped
    s1, s2 = e.states
    flipped = s1.matrix() @ np.array([[0, 1], [1, 0]]).T
    assert np.allclose(flipped, s2.matrix())


def test_ensemble_E2():
    e = ensemble_E2()
    assert e.probabilities == [0.5, 0.5]
    for s in e.states:
        assert entanglement_entropy(s) == pytest.approx(0, abs=1e-12)
    assert holevo(e).chi == pytest.approx(binary_entropy(C.x0), abs=1e-12)


def test_comm_rate_examples(rng):
    assert comm_rate(ensemble_E1(), XX, 1e-5) == pytest.approx(C.alpha, abs=1e-3)
    assert comm_rate(ensemble_E2(), build("K_prime", mu_sum=1).matrix, 1e-5) == pytest.approx(C.alpha, abs=1e-3)
    zero = np.zeros((4, 4))
    for e in (ensemble_E1(), ensemble_E2(), random_ensemble(rng)):
        assert comm_rate(e, zero) == 0
    with pytest.raises(ValueError):
        comm_rate(ensemble_E1(), XX, 0.0)


def test_comm_rate_central_option():
    fwd = comm_rate(ensemble_E1(), XX, 1e-4)
    cen = comm_rate(ensemble_E1(), XX, 1e-4, central=True)
    assert abs(cen - C.alpha) < abs(fwd - C.alpha) + 1e-12
    assert cen == pytest.approx(C.alpha, abs=1e-7)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_comm_rate_linear_in_coupling(c):
    r = comm_rate(ensemble_E2(), build("K_prime", mu_sum=c).matrix, 1e-5)
    assert r == pytest.approx(c * C.alpha, abs=1e-3)


@pytest.mark.parametrize("t", [1e-3, 1e-4, 1e-5])
def test_E2_analytic_chi(t):
    x0 = C.x0
    expected = binary_entropy(x0 - 2 * t * math.sqrt(x0 * (1 - x0)))
    got = holevo(ensemble_E2().evolved(XX, t)).chi
    assert abs(got - expected) <= 5 * t**2


@given(seeds)
def test_holevo_invariant_under_alice_unitaries(seed):
    rng = np.random.default_rng(seed)
    e = random_ensemble(rng, dims=(2, 2, 2, 1))
    u = random_unitary(4, rng)
    moved = Ensemble(tuple((p, PureState(s.dims, (u @ s.matrix()).reshape(-1))) for p, s in e.members))
    assert holevo(moved).chi == pytest.approx(holevo(e).chi, abs=1e-10)


@given(seeds, st.sampled_from([(2, 1, 2, 1), (2, 2, 2, 2), (2, 1, 2, 3)]), st.integers(1, 5))
def test_holevo_bounds(seed, dims, k):
    rng = np.random.default_rng(seed)
    chi = holevo(random_ensemble(rng, dims, k)).chi
    assert -1e-10 <= chi <= math.log2(dims[2] * dims[3]) + 1e-10


@given(seeds)
def test_comm_rate_of_random_ensemble_is_finite(seed):
    rng = np.random.default_rng(seed)
    r = comm_rate(random_ensemble(rng), random_hermitian(4, rng))
    assert math.isfinite(r)
