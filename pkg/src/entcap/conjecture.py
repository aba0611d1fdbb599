"""Conjectured capacity of mu_xy (XX + YY) + ZZ and the optimizer sweep over (mu_x, mu_y)."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .canonical import XX, YY, ZZ
from .capacity import OptimizerConfig, optimize_rate

BOUNDARY_MARGIN = 1e-9
CSV_HEADER = ("mu_x", "mu_y", "capacity", "conjecture", "gap")


@dataclass(frozen=True)
class ConjectureParams:
    p1: float
    p2: float
    theta: float
    phi: float
    xi: float

    def __post_init__(self):
        if not (self.p1 > 0 and self.p2 > 0 and self.p4 > 0):
            raise ValueError(
                f"need p1 > 0, p2 > 0, p4 = 1 - p1 - 2 p2 > 0; got p1={self.p1}, p2={self.p2}"
            )

    @property
    def p4(self) -> float:
        return 1.0 - self.p1 - 2.0 * self.p2


def _term(a, b):
    return np.sqrt(a * b) * np.log2(a / b)


def _objective(p1, p2, theta, phi, xi, mu_xy):
    p4 = 1.0 - p1 - 2.0 * p2
    return 2.0 * (
        _term(p1, p2) * (np.sin(theta) + mu_xy * np.sin(phi - xi))
        + _term(p2, p4) * (np.sin(phi) + mu_xy * np.sin(theta - xi))
        + _term(p1, p4) * mu_xy * np.sin(xi)
    )


def conjecture_objective(params: ConjectureParams, mu_xy: float) -> float:
    return float(_objective(params.p1, params.p2, params.theta, params.phi, params.xi, mu_xy))


def _unpack(z):
    """Map 6 unconstrained reals to (p1, p2, theta, phi, xi) inside the open domain."""
    w = np.exp(z[:3] - np.max(z[:3]))
    q = w / (w[0] + 2.0 * w[1] + w[2])
    p = BOUNDARY_MARGIN + (1.0 - 4.0 * BOUNDARY_MARGIN) * q
    return p[0], p[1], z[3], z[4], z[5]


def conjecture_argmax(mu_xy: float, restarts: int = 64, seed: int = 0):
    """Multistart maximization of the conjectured objective; returns (value, params)."""
    if mu_xy < 0:
        raise ValueError(f"mu_xy must be >= 0, got {mu_xy!r}")
    best_val, best_z = -np.inf, None
    for seq in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(seq)
        z0 = np.concatenate([rng.normal(scale=2.0, size=3), rng.uniform(0, 2 * np.pi, 3)])
        res = minimize(lambda z: -_objective(*_unpack(z), mu_xy), z0, method="BFGS")
        if -res.fun > best_val:
            best_val, best_z = -res.fun, res.x
    p1, p2, theta, phi, xi = _unpack(best_z)
    params = ConjectureParams(
        float(p1), float(p2), *(float(np.mod(a, 2 * np.pi)) for a in (theta, phi, xi))
    )
    return conjecture_objective(params, mu_xy), params


def conjectured_capacity(mu_xy: float, restarts: int = 64, seed: int = 0) -> float:
    return conjecture_argmax(mu_xy, restarts, seed)[0]


def k_mu_xy(mu_x: float, mu_y: float) -> np.ndarray:
    """mu_x XX + mu_y YY + ZZ."""
    return mu_x * XX + mu_y * YY + ZZ


@dataclass(frozen=True)
class SweepPoint:
    mu_x: float
    mu_y: float
    optimized_capacity: float
    conjectured_capacity: float | None = None
    gap: float | None = None


def _point_seed(seed: int, mu_x: float, mu_y: float) -> int:
    # derived from the point's values so results do not depend on grid order
    bits = np.array([mu_x, mu_y], dtype=np.float64).view(np.uint64)
    seq = np.random.SeedSequence([int(seed), int(bits[0]), int(bits[1])])
    return int(seq.generate_state(1)[0])


def sweep(mu_x_grid, mu_y_grid, ancilla=(2, 2), config: OptimizerConfig | None = None,
          conjecture_restarts: int = 64) -> list[SweepPoint]:
    config = config or OptimizerConfig()
    points = []
    for mx in mu_x_grid:
        for my in mu_y_grid:
            mx, my = float(mx), float(my)
            if mx < my:
                continue
            cfg = replace(config, seed=_point_seed(config.seed, mx, my))
            cap = optimize_rate(k_mu_xy(mx, my), ancilla, cfg).best_rate
            conj = gap = None
            if mx == my:
                conj = conjectured_capacity(mx, conjecture_restarts, cfg.seed)
                gap = cap - conj
            points.append(SweepPoint(mx, my, cap, conj, gap))
    return points


def _fmt(v) -> str:
    return "" if v is None else f"{v:.9g}"


def sweep_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for pt in points:
        writer.writerow(
            [_fmt(pt.mu_x), _fmt(pt.mu_y), _fmt(pt.optimized_capacity),
             _fmt(pt.conjectured_capacity), _fmt(pt.gap)]
        )
    return buf.getvalue()
