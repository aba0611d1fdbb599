"""Holevo information of Bob's ensembles and entanglement-assisted communication rates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import as_matrix
from .capacity import constants
from .qmath import PureState, evolve, partial_trace_A, partial_trace_B, require_hermitian, von_neumann_entropy

PROB_TOL = 1e-12


@dataclass(frozen=True)
class Ensemble:
    members: tuple  # of (p, PureState)

    def __post_init__(self):
        members = tuple((float(p), s) for p, s in self.members)
        if not members:
            raise ValueError("ensemble has no members")
        if any(p <= 0 for p, _ in members):
            raise ValueError("ensemble probabilities must be positive")
        total = sum(p for p, _ in members)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"ensemble probabilities sum to {total!r}, expected 1")
        if len({s.dims for _, s in members}) != 1:
            raise ValueError("ensemble members have different dims")
        object.__setattr__(self, "members", members)

    @property
    def probabilities(self) -> list[float]:
        return [p for p, _ in self.members]

    @property
    def states(self) -> list[PureState]:
        return [s for _, s in self.members]

    def evolved(self, h, t: float) -> "Ensemble":
        return Ensemble(tuple((p, evolve(s, h, t)) for p, s in self.members))


@dataclass(frozen=True)
class ChiResult:
    chi: float
    average_entropy: float
    entropy_of_average: float


def holevo(e: Ensemble, traced_side: str = "A") -> ChiResult:
    """Holevo information of the reduced ensemble after tracing out ``traced_side``.

    The default traces out AA', leaving Bob's states on BB'.
    """
    if traced_side == "A":
        reduce = partial_trace_A
    elif traced_side == "B":
        reduce = partial_trace_B
    else:
        raise ValueError(f"traced_side must be 'A' or 'B', got {traced_side!r}")
    rhos = [reduce(s) for s in e.states]
    probs = e.probabilities
    avg_rho = sum(p * r for p, r in zip(probs, rhos))
    avg_s = float(sum(p * von_neumann_entropy(r) for p, r in zip(probs, rhos)))
    s_avg = von_neumann_entropy(avg_rho)
    return ChiResult(chi=s_avg - avg_s, average_entropy=avg_s, entropy_of_average=s_avg)


def ensemble_E1() -> Ensemble:
    """Two entangled states related by sigma_x on Bob's qubit.

    Under sigma_x (x) sigma_x both lose entanglement at rate alpha, so Bob's
    states purify while their average stays I/2.
    """
    x0 = constants().x0
    a, b = np.sqrt(x0), np.sqrt(1.0 - x0)
    psi1 = np.array([0, a, 1j * b, 0], dtype=complex)  # |01>, |10>
    psi2 = np.array([a, 0, 0, 1j * b], dtype=complex)  # |00>, |11>
    dims = (2, 1, 2, 1)
    return Ensemble(((0.5, PureState(dims, psi1)), (0.5, PureState(dims, psi2))))


def ensemble_E2() -> Ensemble:
    """Product states |+>|b_-> and |->|b_+> with |b_pm> = (sqrt x0, pm i sqrt(1-x0))."""
    x0 = constants().x0
    a, b = np.sqrt(x0), np.sqrt(1.0 - x0)
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    psi1 = np.kron(plus, [a, -1j * b])
    psi2 = np.kron(minus, [a, 1j * b])
    dims = (2, 1, 2, 1)
    return Ensemble(((0.5, PureState(dims, psi1)), (0.5, PureState(dims, psi2))))


def comm_rate(e: Ensemble, h, delta_t: float = 1e-5, central: bool = False) -> float:
    """Rate of change of Bob's Holevo information under ``h``, in bits per unit time.

    Forward difference by default; ``central=True`` uses the symmetric quotient.
    """
    if not delta_t > 0:
        raise ValueError(f"delta_t must be positive, got {delta_t!r}")
    h = require_hermitian(as_matrix(h), (4, 4))
    after = holevo(e.evolved(h, delta_t)).chi
    if central:
        before = holevo(e.evolved(h, -delta_t)).chi
        return (after - before) / (2 * delta_t)
    return (after - holevo(e).chi) / delta_t


def chi_change(e: Ensemble, h, delta_t: float = 1e-5) -> tuple[float, float]:
    """(chi before, chi after evolving for ``delta_t``)."""
    h = require_hermitian(as_matrix(h), (4, 4))
    return holevo(e).chi, holevo(e.evolved(h, delta_t)).chi
