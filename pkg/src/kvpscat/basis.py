"""Radial and vibrational basis sets for variational scattering calculations.

Two radial families live here: energy-normalized continuum functions
u0/u1 that carry the asymptotic boundary conditions of open channels,
and a ladder of square-integrable bound functions u_l = F_l R^{l-1}
e^{-gamma R} that describe the collision region.  Vibrational channel
functions are unit mass/frequency harmonic-oscillator eigenstates.

The bound functions are not orthogonal; ``overlap_matrix`` and
``orthogonalize`` build the symmetric-orthogonalization transform that
downstream matrix assembly uses to remove near-linear dependence.

Ordering convention for the product basis |u_l phi_n>: row index
``n * (n_l - 1) + (l - 2)`` with channel n outermost (channel-major).
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .quadrature import hermite_grid, hermite_order_for

__all__ = [
    "RadialBasisSpec",
    "ChannelSet",
    "OrthoTransform",
    "make_channels",
    "eval_u0",
    "eval_ul",
    "eval_ul_d2",
    "eval_ho",
    "radial_overlap",
    "overlap_matrix",
    "orthogonalize",
    "orthogonalize_to_rank",
]


@dataclass(frozen=True)
class RadialBasisSpec:
    """Bound radial basis u_l(R) = F_l R^{l-1} e^{-gamma R}, l = 2..n_l.

    F_l normalizes each function to unit L2 norm on [0, inf).
    """

    gamma: float
    n_l: int

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.n_l < 2:
            raise ValueError("n_l must be at least 2")

    @property
    def n_bound(self) -> int:
        """Number of bound functions per channel (l runs 2..n_l)."""
        return self.n_l - 1

    def normalization(self, l: int) -> float:
        """F_l such that the L2 norm of u_l on [0, inf) is one."""
        _check_l(l, self.n_l)
        return np.sqrt((2.0 * self.gamma) ** (2 * l - 1) / factorial(2 * l - 2))


@dataclass(frozen=True)
class ChannelSet:
    """Open/closed channel bookkeeping at a fixed total energy.

    ``energy`` is the total energy in the problem's own convention;
    ``e_hamiltonian`` is the same energy in Hamiltonian units (they
    differ for problems whose Schroedinger equation reads H psi =
    (E/2) psi).  Wavenumbers and velocities are per open channel,
    k_n = sqrt(2 mu (e_hamiltonian - threshold_n)), v_n = k_n / mu.
    """

    n_channels: int
    n_open: int
    thresholds: np.ndarray
    mu: float
    energy: float
    e_hamiltonian: float
    wavenumbers: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        if self.n_open > self.n_channels:
            raise ValueError("more open channels than channels")


def make_channels(
    thresholds, mu: float, energy: float, *, half_energy: bool = False
) -> ChannelSet:
    """Build a ChannelSet from thresholds (ascending, Hamiltonian units).

    ``half_energy=True`` selects the convention H psi = (E/2) psi, so the
    Hamiltonian-unit collision energy is energy/2.
    """
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.ndim != 1 or thresholds.size == 0:
        raise ValueError("thresholds must be a nonempty 1-d array")
    if np.any(np.diff(thresholds) < 0):
        raise ValueError("thresholds must be sorted ascending")
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    e_h = energy / 2.0 if half_energy else energy
    open_mask = thresholds < e_h
    n_open = int(np.count_nonzero(open_mask))
    k = np.sqrt(2.0 * mu * (e_h - thresholds[open_mask]))
    return ChannelSet(
        n_channels=thresholds.size,
        n_open=n_open,
        thresholds=thresholds,
        mu=mu,
        energy=energy,
        e_hamiltonian=e_h,
        wavenumbers=k,
        velocities=k / mu,
    )


def _check_l(l: int, n_l: int) -> None:
    if not 2 <= l <= n_l:
        raise ValueError(f"bound index l={l} outside 2..{n_l}")


def eval_u0(channel: int, r, channels: ChannelSet, spec: RadialBasisSpec):
    """Continuum function u0_n(R) = f(R) e^{-i k_n R} v_n^{-1/2}.

    f(R) = 1 - e^{-gamma R} regularizes the origin (u0(0) = 0).  Only
    open channels carry continuum functions; the outgoing partner u1 is
    the complex conjugate of this value.
    """
    if not 0 <= channel < channels.n_open:
        raise ValueError(
            f"channel {channel} is not open (n_open={channels.n_open})"
        )
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    k = channels.wavenumbers[channel]
    v = channels.velocities[channel]
    f = 1.0 - np.exp(-spec.gamma * r)
    return f * np.exp(-1j * k * r) / np.sqrt(v)


def eval_ul(l: int, r, spec: RadialBasisSpec):
    """Bound radial function u_l(R) = F_l R^{l-1} e^{-gamma R}."""
    _check_l(l, spec.n_l)
    r = np.asarray(r, dtype=float)
    return spec.normalization(l) * r ** (l - 1) * np.exp(-spec.gamma * r)


def eval_ul_d2(l: int, r, spec: RadialBasisSpec):
    """Analytic second derivative of u_l.

    d2/dR2 [R^{l-1} e^{-g R}] = [ (l-1)(l-2) R^{l-3} - 2 g (l-1) R^{l-2}
    + g^2 R^{l-1} ] e^{-g R}; the R^{l-3} term carries a zero prefactor
    at l = 2, so it is skipped rather than evaluated at R = 0.
    """
    _check_l(l, spec.n_l)
    r = np.asarray(r, dtype=float)
    g = spec.gamma
    out = g * g * r ** (l - 1) - 2.0 * g * (l - 1) * r ** (l - 2)
    if l > 2:
        out = out + (l - 1) * (l - 2) * r ** (l - 3)
    return spec.normalization(l) * out * np.exp(-g * r)


def eval_ho(v: int, r):
    """Harmonic-oscillator eigenfunction phi_v(r), unit mass and frequency.

    Orthonormal on R with eigenvalue v + 1/2.  Uses the normalized
    three-term recurrence, stable for large v.
    """
    if v < 0:
        raise ValueError("v must be nonnegative")
    r = np.asarray(r, dtype=float)
    phi_prev = np.zeros_like(r)
    phi = np.pi ** (-0.25) * np.exp(-0.5 * r * r)
    for j in range(1, v + 1):
        phi, phi_prev = (
            np.sqrt(2.0 / j) * r * phi - np.sqrt((j - 1) / j) * phi_prev,
            phi,
        )
    return phi


def ho_energy(v: int) -> float:
    """Oscillator eigenvalue v + 1/2."""
    return v + 0.5


def radial_overlap(l: int, lp: int, spec: RadialBasisSpec) -> float:
    """Closed-form <u_l|u_l'> from the Gamma integral.

    int_0^inf R^{l+l'-2} e^{-2 gamma R} dR = (l+l'-2)! / (2 gamma)^{l+l'-1}.
    """
    _check_l(l, spec.n_l)
    _check_l(lp, spec.n_l)
    f = spec.normalization(l) * spec.normalization(lp)
    return f * factorial(l + lp - 2) / (2.0 * spec.gamma) ** (l + lp - 1)


def overlap_matrix(spec: RadialBasisSpec, channels: ChannelSet) -> np.ndarray:
    """Overlap of the product basis |u_l phi_n>, channel-major ordering.

    Vibrational orthonormality makes it block diagonal: O = delta_nn'
    <u_l|u_l'>.
    """
    nb = spec.n_bound
    o_rad = np.empty((nb, nb))
    for i, l in enumerate(range(2, spec.n_l + 1)):
        for j, lp in enumerate(range(2, spec.n_l + 1)):
            o_rad[i, j] = radial_overlap(l, lp, spec)
    return np.kron(np.eye(channels.n_channels), o_rad)


@dataclass(frozen=True)
class OrthoTransform:
    """Rectangular transform X into the orthogonalized basis.

    Columns are overlap eigenvectors scaled by 1/sqrt(lambda_i), one per
    retained eigenvalue (lambda_i > cutoff, reported descending), so
    X^T O X = I_{n_q}.
    """

    x: np.ndarray
    eigenvalues: np.ndarray
    cutoff: float
    n_q: int


def orthogonalize(o: np.ndarray, cutoff: float) -> OrthoTransform:
    """Symmetric orthogonalization of an overlap matrix with eigenvalue cutoff."""
    o = np.asarray(o, dtype=float)
    if o.ndim != 2 or o.shape[0] != o.shape[1]:
        raise ValueError("overlap matrix must be square")
    if cutoff <= 0.0:
        raise ValueError("cutoff must be positive")
    eigval, eigvec = np.linalg.eigh(o)
    order = np.argsort(eigval)[::-1]
    eigval, eigvec = eigval[order], eigvec[:, order]
    keep = eigval > cutoff
    n_q = int(np.count_nonzero(keep))
    if n_q == 0:
        raise ValueError(
            f"cutoff too large: no overlap eigenvalue exceeds {cutoff}"
        )
    lam = eigval[:n_q]
    vec = eigvec[:, :n_q].copy()
    # sign convention: largest-magnitude component of each vector positive
    for i in range(n_q):
        j = int(np.argmax(np.abs(vec[:, i])))
        if vec[j, i] < 0:
            vec[:, i] = -vec[:, i]
    return OrthoTransform(
        x=vec / np.sqrt(lam), eigenvalues=lam, cutoff=cutoff, n_q=n_q
    )


def orthogonalize_to_rank(o: np.ndarray, n_q: int) -> OrthoTransform:
    """Orthogonalize keeping exactly n_q eigenvalues (cutoff placed in the gap)."""
    o = np.asarray(o, dtype=float)
    eigval = np.sort(np.linalg.eigvalsh(o))[::-1]
    if not 1 <= n_q <= eigval.size:
        raise ValueError(f"n_q must be in 1..{eigval.size}")
    if n_q < eigval.size:
        lo, hi = eigval[n_q], eigval[n_q - 1]
        if hi - lo < 1e-12 * max(1.0, hi):
            raise ValueError("no spectral gap at the requested rank")
        cutoff = 0.5 * (lo + hi)
    else:
        cutoff = 0.5 * eigval[-1]
    return orthogonalize(o, cutoff)


def vib_overlap_quadrature(v: int, vp: int, weight=None, order: int | None = None):
    """<phi_v | g(r) | phi_v'> by Gauss-Hermite quadrature.

    ``weight`` is an optional callable g(r); identity when omitted.  The
    e^{-r^2} Gaussian of the product phi_v phi_v' is folded into the
    rule's weight, so the evaluated factor stays polynomially bounded.
    """
    if order is None:
        order = hermite_order_for(max(v, vp))
    x, w = hermite_grid(order)
    # phi_v phi_v' = h_v h_v' e^{-x^2} with h the e^{+x^2/2}-rescaled values
    hv = eval_ho(v, x) * np.exp(0.5 * x * x)
    hvp = hv if vp == v else eval_ho(vp, x) * np.exp(0.5 * x * x)
    g = 1.0 if weight is None else weight(x)
    return float(np.sum(w * hv * hvp * g))
