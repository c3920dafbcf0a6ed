"""Variational quantum linear solver on the embedded statevector simulator.

Solves M x = e_k for real symmetric M by preparing a normalized trial
state with the layered ansatz and minimizing the local cost function
with a multi-start Nelder-Mead search.  Column-wise solves, together
with norm and sign recovery, reassemble M^{-1}.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.optimize import minimize

from .qsim import StateVector, _apply_cx, _apply_ry, ansatz, pauli_action, run

__all__ = [
    "PauliDecomposition",
    "VqlsSolution",
    "InversionResult",
    "OptConfig",
    "decompose",
    "reconstruct",
    "cost_global",
    "cost_local",
    "solve_column",
    "invert",
    "fidelity",
]


@dataclass(frozen=True)
class PauliDecomposition:
    """Expansion M = sum_l c_l P_l with real coefficients.

    Built only for real symmetric sources, so strings with an odd
    number of Y letters never appear (their traces vanish identically).
    """

    n_qubits: int
    terms: tuple
    drop_tolerance: float


@dataclass(frozen=True)
class VqlsSolution:
    """One converged (or best-effort) column solve.

    ``cost_final`` is the global cost at the optimum, which bounds the
    residual of the recovered column; the optimizer itself minimizes the
    local cost, whose best value is ``cost_local_final``.
    """

    x_state: StateVector
    theta: np.ndarray
    norm_q: float
    cost_final: float
    cost_local_final: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class OptConfig:
    """Multi-start Nelder-Mead settings for the column solves.

    Each restart runs one simplex search from random angles and then up
    to ``polish_rounds`` continuation searches from its best point with
    progressively smaller initial simplexes (plain Nelder-Mead escapes
    simplex collapse this way without extra random starts).
    """

    restarts: int = 8
    maxiter: int = 2000
    target: float = 1e-6
    seed: int | None = None
    xatol: float = 1e-10
    fatol: float = 1e-13
    polish_rounds: int = 6


@dataclass(frozen=True)
class InversionResult:
    m_inverse: np.ndarray
    fidelities: np.ndarray | None
    norms: np.ndarray
    costs: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    columns: tuple

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def decompose(m: np.ndarray, drop_tol: float = 1e-12) -> PauliDecomposition:
    """Pauli expansion of a real symmetric matrix, c_l = Tr(M P_l)/2^n.

    All 4^n strings are enumerated; coefficients with |c_l| <= drop_tol
    are dropped (at drop_tol = 0 the reconstruction is exact).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    dim = m.shape[0]
    if not _is_power_of_two(dim):
        raise ValueError(
            f"dimension {dim} is not a power of two; pad with an identity "
            "block before decomposing"
        )
    scale = np.max(np.abs(m))
    if np.max(np.abs(m - m.T)) > 1e-10 * max(1.0, scale):
        raise ValueError("matrix must be symmetric")
    n = dim.bit_length() - 1
    rows = np.arange(dim)
    terms = []
    for letters in product("IXYZ", repeat=n):
        p = "".join(letters)
        perm, sign, phase = pauli_action(p)
        c = phase * np.sum(sign * m[rows, perm]) / dim
        if abs(c) > drop_tol:
            terms.append((float(c.real), p))
    return PauliDecomposition(
        n_qubits=n, terms=tuple(terms), drop_tolerance=drop_tol
    )


def reconstruct(decomp: PauliDecomposition) -> np.ndarray:
    """Dense sum_l c_l P_l (test/diagnostic path)."""
    dim = 1 << decomp.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for c, p in decomp.terms:
        perm, sign, phase = pauli_action(p)
        out[perm, cols] += c * phase * sign
    return out.real if np.max(np.abs(out.imag)) < 1e-12 else out


def _apply_terms(decomp: PauliDecomposition, amplitudes: np.ndarray) -> np.ndarray:
    """Phi = M |x> accumulated term by term from the Pauli expansion."""
    phi = np.zeros_like(amplitudes)
    for c, p in decomp.terms:
        perm, sign, phase = pauli_action(p)
        phi += (c * phase) * (sign * amplitudes)[perm]
    return phi


class _CompiledTerms:
    """Stacked gather arrays so Phi = M|x> is one fancy-index and reduce.

    (P v)[i] = phase * sign[i ^ mask] * v[i ^ mask], so each term is a
    gather through its permutation with the sign gathered alongside.
    Real symmetric sources retain only even-Y strings, whose phase
    i^(#Y) is +-1, so the stacked weights stay real.
    """

    def __init__(self, decomp: PauliDecomposition):
        dim = 1 << decomp.n_qubits
        n_t = len(decomp.terms)
        self.perms = np.empty((n_t, dim), dtype=np.intp)
        self.weights = np.empty((n_t, dim))
        for i, (c, p) in enumerate(decomp.terms):
            perm, sign, phase = pauli_action(p)
            self.perms[i] = perm
            self.weights[i] = (c * phase).real * sign[perm]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return (self.weights * v[self.perms]).sum(axis=0)


def _ansatz_amplitudes(theta, n: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.size % n != 0 or theta.size < 2 * n:
        raise ValueError("theta length must be n*(depth+1) with depth >= 1")
    depth = theta.size // n - 1
    return run(ansatz(n, depth, theta)).amplitudes


def _ansatz_state_real(theta: np.ndarray, n: int, depth: int) -> np.ndarray:
    """Real amplitudes of run(ansatz(n, depth, theta)): the layered ansatz
    is built from RotY and CX, both real, so the optimizer can work in a
    real statevector (kept in lockstep with qsim by a regression test)."""
    amp = np.zeros(1 << n)
    amp[0] = 1.0
    for q in range(n):
        _apply_ry(amp, n, q, theta[q])
    for layer in range(1, depth + 1):
        for q in range(n - 1):
            _apply_cx(amp, n, q, q + 1)
        base = layer * n
        for q in range(n):
            _apply_ry(amp, n, q, theta[base + q])
    return amp


@lru_cache(maxsize=16)
def _z_signs(n: int) -> np.ndarray:
    """(n, 2^n) table of Z_j eigenvalues per basis index."""
    idx = np.arange(1 << n)
    return np.array(
        [1.0 - 2.0 * ((idx >> (n - 1 - q)) & 1) for q in range(n)]
    )


def cost_global(theta, decomp: PauliDecomposition, b_index: int) -> float:
    """C_G = 1 - |<b|M|x(theta)>|^2 / <x|M^dag M|x> with |b> = |e_k>."""
    n = decomp.n_qubits
    if not decomp.terms:
        raise ValueError("empty decomposition")
    phi = _apply_terms(decomp, _ansatz_amplitudes(theta, n))
    denom = float(np.vdot(phi, phi).real)
    if denom == 0.0:
        raise ValueError("M annihilates ansatz state")
    return 1.0 - abs(phi[b_index]) ** 2 / denom


def cost_local(theta, decomp: PauliDecomposition, b_index: int) -> float:
    """Local cost 1 - <Phi|U O U^dag|Phi> / <Phi|Phi>.

    O = 1/2 + (1/2n) sum_j Z_j and U is the X-gate preparation of |b>,
    so conjugation by U flips the sign of Z_j on the qubits where the
    bit of b_index is set.
    """
    n = decomp.n_qubits
    if not decomp.terms:
        raise ValueError("empty decomposition")
    phi = _apply_terms(decomp, _ansatz_amplitudes(theta, n))
    denom = float(np.vdot(phi, phi).real)
    if denom == 0.0:
        raise ValueError("M annihilates ansatz state")
    probs = (phi.conj() * phi).real
    signs = _z_signs(n)
    z_sum = 0.0
    for q in range(n):
        zq = float(np.dot(signs[q], probs))
        z_sum += -zq if (b_index >> (n - 1 - q)) & 1 else zq
    return 1.0 - (0.5 * denom + z_sum / (2.0 * n)) / denom


def _local_weight_vector(n: int, b_index: int) -> np.ndarray:
    """Diagonal of U O U^dag in the computational basis.

    O = 1/2 + (1/2n) sum_j Z_j; conjugation by the X-gate preparation of
    |b> flips the Z sign on qubits where the bit of b_index is set."""
    signs = _z_signs(n)
    w = np.full(1 << n, 0.5)
    for q in range(n):
        flip = -1.0 if (b_index >> (n - 1 - q)) & 1 else 1.0
        w += flip * signs[q] / (2.0 * n)
    return w


def _nm(objective, x0, opt: OptConfig, simplex_scale: float | None = None):
    options = {
        "maxiter": opt.maxiter,
        "xatol": opt.xatol,
        "fatol": opt.fatol,
        "adaptive": True,
    }
    if simplex_scale is not None:
        base = np.asarray(x0, dtype=float)
        simplex = np.tile(base, (base.size + 1, 1))
        for i in range(base.size):
            simplex[i + 1, i] += simplex_scale
        options["initial_simplex"] = simplex
    return minimize(objective, x0, method="Nelder-Mead", options=options)


def solve_column(
    decomp: PauliDecomposition,
    b_index: int,
    depth: int,
    opt: OptConfig | None = None,
    rng: np.random.Generator | None = None,
) -> VqlsSolution:
    """Minimize the local cost for one right-hand side e_{b_index}.

    Runs up to ``opt.restarts`` Nelder-Mead searches from uniform random
    starting angles, each followed by continuation polish, stopping early
    once the cost target is reached.  Non-convergence is reported through
    the ``converged`` flag rather than raised.
    """
    opt = opt or OptConfig()
    n = decomp.n_qubits
    if not 0 <= b_index < (1 << n):
        raise ValueError("b_index out of range")
    if not decomp.terms:
        raise ValueError("empty decomposition")
    if rng is None:
        rng = np.random.default_rng(opt.seed)
    n_params = n * (depth + 1)
    compiled = _CompiledTerms(decomp)
    w_local = _local_weight_vector(n, b_index)

    def objective(theta):
        amp = _ansatz_state_real(theta, n, depth)
        phi = compiled.apply(amp)
        denom = phi @ phi
        if denom == 0.0:
            raise ValueError("M annihilates ansatz state")
        probs = phi * phi
        return 1.0 - (w_local @ probs) / denom

    best_f, best_x = np.inf, None
    total_iter = 0
    for _ in range(max(1, opt.restarts)):
        theta0 = rng.uniform(-np.pi, np.pi, n_params)
        res = _nm(objective, theta0, opt)
        total_iter += int(res.nit)
        f, x = float(res.fun), res.x
        # continuation polish: fresh, shrinking simplexes around the optimum
        for round_ in range(opt.polish_rounds):
            if f <= opt.target:
                break
            res = _nm(objective, x, opt, simplex_scale=0.2 / 4.0**round_)
            total_iter += int(res.nit)
            if res.fun >= f - 1e-15:
                break
            f, x = float(res.fun), res.x
        if f < best_f:
            best_f, best_x = f, x
        if best_f <= opt.target:
            break

    theta_opt = np.asarray(best_x, dtype=float)
    amp = _ansatz_amplitudes(theta_opt, n)
    phi = _apply_terms(decomp, amp)
    norm_phi = float(np.linalg.norm(phi))
    return VqlsSolution(
        x_state=StateVector(n_qubits=n, amplitudes=amp),
        theta=theta_opt,
        norm_q=1.0 / norm_phi,
        cost_final=cost_global(theta_opt, decomp, b_index),
        cost_local_final=best_f,
        iterations=total_iter,
        converged=bool(best_f <= opt.target),
    )


def fidelity(x_q: StateVector, x_c: np.ndarray) -> float:
    """Squared overlap |<x_q|x_c>|^2 with a unit-norm reference vector."""
    x_c = np.asarray(x_c)
    if x_c.shape != x_q.amplitudes.shape:
        raise ValueError("state dimensions differ")
    if abs(np.linalg.norm(x_c) - 1.0) > 1e-6:
        raise ValueError("reference vector must have unit norm")
    return float(abs(np.vdot(x_q.amplitudes, x_c)) ** 2)


def _pad_identity(m: np.ndarray) -> np.ndarray:
    """Embed m in the next power-of-two dimension with a decoupled identity block."""
    dim = m.shape[0]
    full = 1 << (dim - 1).bit_length()
    out = np.eye(full)
    out[:dim, :dim] = m
    return out


def invert(
    m: np.ndarray,
    depth: int,
    opt: OptConfig | None = None,
    oracle: np.ndarray | None = None,
    drop_tol: float = 1e-12,
) -> InversionResult:
    """Column-by-column variational inversion of a real symmetric matrix.

    Column k of the inverse is sign_k * N_q,k * x_k with the sign fixed
    by pushing the k-th diagonal of M M^{-1} toward +1.  Matrices whose
    dimension is not a power of two are padded with an identity block
    that inverts to itself; the padding is stripped from every output.
    When a classically computed inverse is supplied as ``oracle``, the
    per-column fidelities against it are reported.
    """
    opt = opt or OptConfig()
    m = np.asarray(m, dtype=float)
    dim = m.shape[0]
    padded = not _is_power_of_two(dim)
    work = _pad_identity(m) if padded else m
    full = work.shape[0]
    decomp = decompose(work, drop_tol=drop_tol)

    seeds = np.random.SeedSequence(opt.seed).spawn(full)
    columns = []
    m_inverse = np.zeros((full, full))
    for k in range(full):
        sol = solve_column(
            decomp, k, depth, opt, rng=np.random.default_rng(seeds[k])
        )
        x = sol.x_state.amplitudes.real
        col = sol.norm_q * x
        d = float(work[k] @ col)
        if abs(-d - 1.0) < abs(d - 1.0):
            col = -col
        m_inverse[:, k] = col
        columns.append(sol)

    m_inverse = m_inverse[:dim, :dim]
    fid = None
    if oracle is not None:
        oracle = np.asarray(oracle, dtype=float)
        if oracle.shape != (dim, dim):
            raise ValueError("oracle inverse has wrong shape")
        fid = np.empty(dim)
        for k in range(dim):
            ref = oracle[:, k] / np.linalg.norm(oracle[:, k])
            if padded:
                ref = np.concatenate([ref, np.zeros(full - dim)])
            fid[k] = fidelity(columns[k].x_state, ref)

    keep = columns[:dim]
    return InversionResult(
        m_inverse=m_inverse,
        fidelities=fid,
        norms=np.array([c.norm_q for c in keep]),
        costs=np.array([c.cost_final for c in keep]),
        iterations=np.array([c.iterations for c in keep]),
        converged=np.array([c.converged for c in keep]),
        columns=tuple(keep),
    )
