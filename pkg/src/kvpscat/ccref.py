"""Numerically exact coupled-channel reference solver.

Propagates the renormalized-Numerov ratio of successive solution
matrices from a hard wall out to the asymptotic region, then matches to
velocity-normalized sine/cosine pairs in open channels (decaying /
growing exponential pairs, Wronskian-matched, in closed channels) to
form the reactance matrix K.  Closed channels are projected out after
the K step and S = (I + iK)(I - iK)^{-1}.

The solver carries its own channel basis (default 8 vibrational levels
for the SJ model) so oracle convergence is independent of the
variational basis; convergence is established by doubling the grid and
the channel count.
"""

from dataclasses import dataclass

import numpy as np

from .basis import ho_energy
from .kvp import SMatrixResult
from .matelem import (
    ONE_CHANNEL,
    SECREST_JOHNSON,
    ScatteringProblem,
    vib_coupling_matrix,
)

__all__ = ["CcGrid", "coupling_matrix", "solve_cc", "default_grid"]

DEFAULT_WALL = 1e10
SJ_CC_CHANNELS = 8


@dataclass(frozen=True)
class CcGrid:
    r_min: float
    r_max: float
    n_steps: int

    def __post_init__(self):
        if self.r_min < 0:
            raise ValueError("r_min must be nonnegative")
        if self.r_max <= self.r_min:
            raise ValueError("r_max must exceed r_min")
        if self.n_steps < 2:
            raise ValueError("need at least two propagation steps")

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / self.n_steps


def default_grid(problem: ScatteringProblem) -> CcGrid:
    """Grid dense enough for ~1e-8 S-matrix accuracy on the model problems."""
    if problem.kind == ONE_CHANNEL:
        return CcGrid(r_min=0.0, r_max=40.0, n_steps=8000)
    # SJ potential tail decays slowly (alpha = 0.3); push the matching
    # point far out so high-channel couplings are negligible there
    return CcGrid(r_min=0.0, r_max=100.0, n_steps=20000)


def _channel_count(problem: ScatteringProblem, n_channels: int | None) -> int:
    if problem.kind == ONE_CHANNEL:
        return 1
    if n_channels is None:
        return max(SJ_CC_CHANNELS, problem.channels.n_open + 1)
    return n_channels


def coupling_matrix(
    problem: ScatteringProblem, r: float, n_channels: int | None = None
) -> np.ndarray:
    """Potential-plus-threshold matrix W(R) over the solver's channel basis."""
    n = _channel_count(problem, n_channels)
    if problem.kind == ONE_CHANNEL:
        return np.array([[-np.exp(-r)]])
    g = vib_coupling_matrix(n, problem.beta)
    eps = np.array([ho_energy(v) for v in range(n)])
    return problem.a * np.exp(-problem.alpha * r) * g + np.diag(eps)


def solve_cc(
    problem: ScatteringProblem,
    grid: CcGrid | None = None,
    n_channels: int | None = None,
    wall: float = DEFAULT_WALL,
) -> SMatrixResult:
    """Propagate the coupled equations and return the open-channel S-matrix."""
    if problem.channels.n_open < 1:
        raise ValueError("no open channels")
    if grid is None:
        grid = default_grid(problem)
    n = _channel_count(problem, n_channels)
    mu = problem.mu
    e_h = problem.channels.e_hamiltonian
    h = grid.h
    eye = np.eye(n)

    if problem.kind == ONE_CHANNEL:
        eps = np.zeros(1)
        pot = lambda r: np.array([[-np.exp(-r)]])
    else:
        g = vib_coupling_matrix(n, problem.beta)
        eps = np.array([ho_energy(v) for v in range(n)])
        d_eps = np.diag(eps)
        pot = lambda r: problem.a * np.exp(-problem.alpha * r) * g + d_eps

    def t_mat(r: float) -> np.ndarray:
        # T_n = (h^2/12) W(r),  psi'' = W psi,  W = 2 mu (U - E)
        return (h * h / 12.0) * 2.0 * mu * (pot(r) - e_h * eye)

    def u_mat(t: np.ndarray) -> np.ndarray:
        return np.linalg.solve(eye - t, 2.0 * eye + 10.0 * t)

    # hard wall at r_min: ratio initialized to wall * I
    ratio = wall * eye
    x = grid.r_min
    for _ in range(grid.n_steps - 1):
        x += h
        ratio = u_mat(t_mat(x)) - np.linalg.inv(ratio)

    # two-point matching at a = r_max - h, b = r_max
    b_pt = grid.r_min + grid.n_steps * h
    a_pt = b_pt - h
    open_mask = eps < e_h
    n_open = int(np.count_nonzero(open_mask))
    if n_open < 1:
        raise ValueError("solver channel basis has no open channel")

    def reference(r: float):
        j = np.zeros(n)
        y = np.zeros(n)
        for i in range(n):
            if open_mask[i]:
                k = np.sqrt(2.0 * mu * (e_h - eps[i]))
                v = k / mu
                j[i] = np.sin(k * r) / np.sqrt(v)
                y[i] = np.cos(k * r) / np.sqrt(v)
            else:
                kap = np.sqrt(2.0 * mu * (eps[i] - e_h))
                c = np.sqrt(mu / (2.0 * kap))
                j[i] = c * np.exp(-kap * (r - b_pt))
                y[i] = -c * np.exp(kap * (r - b_pt))
        return np.diag(j), np.diag(y)

    j_a, y_a = reference(a_pt)
    j_b, y_b = reference(b_pt)
    fa = eye - t_mat(a_pt)
    fb = eye - t_mat(b_pt)
    lhs = fb @ y_b - ratio @ fa @ y_a
    rhs = ratio @ fa @ j_a - fb @ j_b
    try:
        k_full = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError("r_max inside interaction region") from exc

    oo = np.ix_(open_mask, open_mask)
    if n_open < n:
        closed = ~open_mask
        oc = np.ix_(open_mask, closed)
        co = np.ix_(closed, open_mask)
        cc = np.ix_(closed, closed)
        k_open = k_full[oo] - k_full[oc] @ np.linalg.solve(
            k_full[cc], k_full[co]
        )
    else:
        k_open = k_full[oo]

    eye_o = np.eye(n_open)
    s = np.linalg.solve(eye_o - 1j * k_open, eye_o + 1j * k_open)
    # restrict to the channels the problem itself tracks
    n_keep = min(n_open, problem.channels.n_open)
    s = s[:n_keep, :n_keep]
    unitarity = float(np.max(np.abs(s.conj().T @ s - np.eye(n_keep))))
    symmetry = float(np.max(np.abs(s - s.T)))
    return SMatrixResult(
        s=s,
        unitarity_defect=unitarity,
        symmetry_defect=symmetry,
        inverter_label="cc-reference",
        energy=problem.channels.energy,
    )
