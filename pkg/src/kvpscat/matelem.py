"""Variational matrix blocks for the two model scattering problems.

Supported problems: a single channel on the half line with the
attractive well V(R) = -e^{-R}, and the Secrest-Johnson (SJ) collinear
atom + harmonic diatom model with interaction A e^{-alpha R + beta r}.
The SJ Schroedinger equation is H psi = (E/2) psi with E measured in
units of the diatom's zero-point energy.

Assembly computes the blocks M00, M10, M0, M of the variational
S-matrix functional.  Continuum functions are never conjugated in bra
position; second derivatives of basis functions are analytic, so only
the radial integral itself is numerical (composite Gauss-Legendre).
Row ordering of M and M0 follows the basis module: channel-major,
index = n*(n_l-1) + (l-2).
"""

from dataclasses import dataclass

import numpy as np

from .basis import (
    ChannelSet,
    OrthoTransform,
    RadialBasisSpec,
    eval_u0,
    eval_ul,
    eval_ul_d2,
    ho_energy,
    make_channels,
    vib_overlap_quadrature,
)
from .quadrature import radial_grid

__all__ = [
    "ScatteringProblem",
    "KvpMatrices",
    "one_channel_exp_well",
    "secrest_johnson",
    "vib_coupling",
    "assemble",
    "assemble_1d",
    "assemble_sj",
    "to_ortho",
]

ONE_CHANNEL = "one_channel_exp_well"
SECREST_JOHNSON = "secrest_johnson"


@dataclass(frozen=True)
class ScatteringProblem:
    """Full physical definition of one scattering calculation at one energy."""

    kind: str
    mu: float
    basis: RadialBasisSpec
    channels: ChannelSet
    r_max: float
    panels: int = 64
    order: int = 16
    # SJ interaction A e^{-alpha R + beta r}; unused for the 1-d well
    a: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    m: float = 1.0


def one_channel_exp_well(
    *,
    k: float | None = None,
    energy: float | None = None,
    n_l: int = 2,
    gamma: float = 1.5,
    mu: float = 1.0,
    r_max: float = 40.0,
    panels: int = 64,
    order: int = 16,
) -> ScatteringProblem:
    """Single-channel problem with V(R) = -e^{-R}.

    The collision point may be given either as a wavenumber ``k`` or as
    a total energy (E = k^2 / 2 mu); exactly one must be supplied.
    """
    if (k is None) == (energy is None):
        raise ValueError("give exactly one of k or energy")
    if k is not None:
        if k <= 0:
            raise ValueError("k must be positive")
        energy = k * k / (2.0 * mu)
    if energy <= 0:
        raise ValueError("energy must be positive (no open channel)")
    return ScatteringProblem(
        kind=ONE_CHANNEL,
        mu=mu,
        basis=RadialBasisSpec(gamma=gamma, n_l=n_l),
        channels=make_channels([0.0], mu, energy),
        r_max=r_max,
        panels=panels,
        order=order,
    )


def secrest_johnson(
    *,
    energy: float = 3.8,
    n_channels: int = 4,
    n_l: int = 4,
    gamma: float = 0.5,
    a: float = 10.0,
    alpha: float = 0.3,
    beta: float = 2.0,
    m: float = 1.0,
    mu: float = 0.6667,
    r_max: float = 60.0,
    panels: int = 64,
    order: int = 16,
) -> ScatteringProblem:
    """SJ model at total energy ``energy`` in zero-point units (H psi = E/2 psi)."""
    thresholds = [ho_energy(v) for v in range(n_channels)]
    channels = make_channels(thresholds, mu, energy, half_energy=True)
    return ScatteringProblem(
        kind=SECREST_JOHNSON,
        mu=mu,
        basis=RadialBasisSpec(gamma=gamma, n_l=n_l),
        channels=channels,
        r_max=r_max,
        panels=panels,
        order=order,
        a=a,
        alpha=alpha,
        beta=beta,
        m=m,
    )


@dataclass(frozen=True)
class KvpMatrices:
    """The blocks of the variational functional at one energy.

    m is real symmetric over the square-integrable basis; m0 couples it
    to the open-channel continuum functions; m00 and m10 are the small
    open-open blocks.  basis_label records whether m/m0 are still in the
    primitive product basis or already orthogonalized.
    """

    m00: np.ndarray
    m10: np.ndarray
    m0: np.ndarray
    m: np.ndarray
    basis_label: str = "primitive"


def vib_coupling(v: int, v_prime: int, beta: float) -> float:
    """Oscillator matrix element <phi_v | e^{beta r} | phi_v'>."""
    if v < 0 or v_prime < 0:
        raise ValueError("quantum numbers must be nonnegative")
    return vib_overlap_quadrature(
        v, v_prime, weight=lambda r: np.exp(beta * r)
    )


def vib_coupling_matrix(n: int, beta: float) -> np.ndarray:
    """Symmetric n x n table of <phi_v|e^{beta r}|phi_v'>."""
    g = np.empty((n, n))
    for v in range(n):
        for vp in range(v, n):
            g[v, vp] = g[vp, v] = vib_coupling(v, vp, beta)
    return g


def _bound_arrays(spec: RadialBasisSpec, r: np.ndarray):
    """Values and analytic second derivatives of u_l on the grid."""
    u = np.array([eval_ul(l, r, spec) for l in range(2, spec.n_l + 1)])
    d2 = np.array([eval_ul_d2(l, r, spec) for l in range(2, spec.n_l + 1)])
    return u, d2


def _continuum_arrays(problem: ScatteringProblem, r: np.ndarray):
    """u0_n and its kinetic remainder t0_n = (T_R + eps_n - E) u0_n.

    With k_n^2 = 2 mu (E - eps_n) the plane-wave part cancels, leaving
    t0 = -(1/2mu)(f'' - 2 i k f') e^{-ikR} / sqrt(v), which decays like
    the cutoff function.
    """
    ch = problem.channels
    g = problem.basis.gamma
    fp = g * np.exp(-g * r)
    fpp = -g * fp
    u0 = np.empty((ch.n_open, r.size), dtype=complex)
    t0 = np.empty_like(u0)
    for n in range(ch.n_open):
        k = ch.wavenumbers[n]
        v = ch.velocities[n]
        wave = np.exp(-1j * k * r) / np.sqrt(v)
        u0[n] = eval_u0(n, r, ch, problem.basis)
        t0[n] = -(fpp - 2j * k * fp) * wave / (2.0 * problem.mu)
    return u0, t0


def assemble_1d(problem: ScatteringProblem) -> KvpMatrices:
    """Blocks for the single-channel exponential well."""
    if problem.kind != ONE_CHANNEL:
        raise ValueError("problem is not the one-channel exponential well")
    ch = problem.channels
    if ch.n_open != 1:
        raise ValueError("one-channel problem must have exactly one open channel")
    r, w = radial_grid(problem.r_max, problem.panels, problem.order)
    pot = -np.exp(-r)
    u, d2 = _bound_arrays(problem.basis, r)
    u0, t0 = _continuum_arrays(problem, r)
    u0, t0 = u0[0], t0[0]

    h_u0 = t0 + pot * u0  # (H - E) u0
    h_ul = -d2 / (2.0 * problem.mu) + (pot - ch.e_hamiltonian) * u

    m00 = np.array([[np.sum(w * u0 * h_u0)]])
    m10 = np.array([[np.sum(w * np.conj(u0) * h_u0)]])
    m0 = (u * (w * h_u0)).sum(axis=1)[:, None]
    m = u @ (w[None, :] * h_ul).T
    return KvpMatrices(m00=m00, m10=m10, m0=m0, m=m)


def assemble_sj(problem: ScatteringProblem) -> KvpMatrices:
    """Channel-coupled blocks for the SJ model in the primitive product basis."""
    if problem.kind != SECREST_JOHNSON:
        raise ValueError("problem is not the SJ model")
    ch = problem.channels
    if ch.n_open < 1:
        raise ValueError("no open channels at this energy")
    n_ch, n_open = ch.n_channels, ch.n_open
    nb = problem.basis.n_bound
    r, w = radial_grid(problem.r_max, problem.panels, problem.order)
    decay = np.exp(-problem.alpha * r)
    g = vib_coupling_matrix(n_ch, problem.beta)
    u, d2 = _bound_arrays(problem.basis, r)
    u0, t0 = _continuum_arrays(problem, r)

    # radial building blocks
    t_rad = u @ (w[None, :] * (-d2 / (2.0 * problem.mu))).T
    o_rad = u @ (w[None, :] * u).T
    p_rad = u @ ((w * decay)[None, :] * u).T
    tc0 = u @ (w[None, :] * t0).T            # (nb, n_open)
    pc0 = u @ ((w * decay)[None, :] * u0).T  # (nb, n_open)
    pcc = u0 @ ((w * decay)[None, :] * u0).T
    pc1 = np.conj(u0) @ ((w * decay)[None, :] * u0).T
    tcc_diag = np.sum(w * u0 * t0, axis=1)
    tc1_diag = np.sum(w * np.conj(u0) * t0, axis=1)

    eps = ch.thresholds
    m = np.kron(problem.a * g, p_rad)
    for n in range(n_ch):
        blk = slice(n * nb, (n + 1) * nb)
        m[blk, blk] += t_rad + (eps[n] - ch.e_hamiltonian) * o_rad

    m0 = np.zeros((n_ch * nb, n_open), dtype=complex)
    for n in range(n_ch):
        for npr in range(n_open):
            m0[n * nb : (n + 1) * nb, npr] = problem.a * g[n, npr] * pc0[:, npr]
            if n == npr:
                m0[n * nb : (n + 1) * nb, npr] += tc0[:, npr]

    g_oo = g[:n_open, :n_open]
    m00 = problem.a * g_oo * pcc + np.diag(tcc_diag)
    m10 = problem.a * g_oo * pc1 + np.diag(tc1_diag)
    return KvpMatrices(m00=m00, m10=m10, m0=m0, m=m)


def assemble(problem: ScatteringProblem) -> KvpMatrices:
    """Dispatch on problem kind."""
    if problem.kind == ONE_CHANNEL:
        return assemble_1d(problem)
    if problem.kind == SECREST_JOHNSON:
        return assemble_sj(problem)
    raise ValueError(f"unknown problem kind {problem.kind!r}")


def to_ortho(mats: KvpMatrices, x: OrthoTransform) -> KvpMatrices:
    """Congruence transform of m and m0 into the orthogonalized basis."""
    if mats.basis_label != "primitive":
        raise ValueError("matrices are already orthogonalized")
    if x.x.shape[0] != mats.m.shape[0]:
        raise ValueError(
            f"transform rows {x.x.shape[0]} do not match basis size {mats.m.shape[0]}"
        )
    return KvpMatrices(
        m00=mats.m00,
        m10=mats.m10,
        m0=x.x.T @ mats.m0,
        m=x.x.T @ mats.m @ x.x,
        basis_label="orthogonalized",
    )
