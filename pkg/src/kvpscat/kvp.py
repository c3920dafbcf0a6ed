"""S-matrix assembly from the variational blocks, with pluggable inversion.

The only large linear-algebra step is inverting the real symmetric
block M; it can be done classically or by the variational quantum
solver.  Everything downstream (the small complex open-channel algebra)
is always classical.
"""

from dataclasses import dataclass

import numpy as np

from . import vqls
from .basis import orthogonalize, orthogonalize_to_rank, overlap_matrix
from .matelem import (
    SECREST_JOHNSON,
    KvpMatrices,
    ScatteringProblem,
    assemble,
    to_ortho,
)

__all__ = [
    "SMatrixResult",
    "InverseQualityError",
    "assemble_s",
    "solve",
    "probabilities",
    "CLASSICAL_RESIDUAL_TOL",
    "VQLS_RESIDUAL_TOL",
]

CLASSICAL_RESIDUAL_TOL = 1e-10
VQLS_RESIDUAL_TOL = 1e-3

# cutoff tuned so the default SJ basis (4 channels x 3 bound functions)
# keeps 8 orthogonalized functions
DEFAULT_SJ_CUTOFF = 0.1


class InverseQualityError(ValueError):
    """Inverse fails the quality gate; carries the offending residual."""

    def __init__(self, residual: float, tol: float):
        super().__init__(
            f"inverse residual {residual:.3e} exceeds tolerance {tol:.1e}"
        )
        self.residual = residual
        self.tol = tol


@dataclass(frozen=True)
class SMatrixResult:
    """Open-channel S-matrix plus quality diagnostics."""

    s: np.ndarray
    unitarity_defect: float
    symmetry_defect: float
    inverter_label: str
    fidelities: np.ndarray | None = None
    inverse_residual: float | None = None
    energy: float | None = None

    @property
    def n_open(self) -> int:
        return self.s.shape[0]


def _defects(s: np.ndarray) -> tuple[float, float]:
    eye = np.eye(s.shape[0])
    unitarity = float(np.max(np.abs(s.conj().T @ s - eye)))
    symmetry = float(np.max(np.abs(s - s.T)))
    return unitarity, symmetry


def assemble_s(
    mats: KvpMatrices,
    m_inverse: np.ndarray,
    *,
    residual_tol: float = CLASSICAL_RESIDUAL_TOL,
    inverter_label: str = "classical",
    fidelities: np.ndarray | None = None,
    energy: float | None = None,
) -> SMatrixResult:
    """S = i (B - C^T B*^{-1} C) from the blocks and a supplied inverse of M.

    B = M00 - M0^T M^{-1} M0 and C = M10 - M0*^T M^{-1} M0.  The inverse
    must pass the quality gate ||M M^{-1} - I||_max < residual_tol; the
    tiny open-channel block B* is always inverted directly.
    """
    m_inverse = np.asarray(m_inverse)
    residual = float(
        np.max(np.abs(mats.m @ m_inverse - np.eye(mats.m.shape[0])))
    )
    if residual >= residual_tol:
        raise InverseQualityError(residual, residual_tol)
    core = m_inverse @ mats.m0
    b = mats.m00 - mats.m0.T @ core
    c = mats.m10 - mats.m0.conj().T @ core
    try:
        b_star_inv = np.linalg.inv(b.conj())
    except np.linalg.LinAlgError as exc:
        raise ValueError("degenerate open-channel block") from exc
    s = 1j * (b - c.T @ b_star_inv @ c)
    unitarity, symmetry = _defects(s)
    return SMatrixResult(
        s=s,
        unitarity_defect=unitarity,
        symmetry_defect=symmetry,
        inverter_label=inverter_label,
        fidelities=fidelities,
        inverse_residual=residual,
        energy=energy,
    )


def solve(
    problem: ScatteringProblem,
    inverter: str = "classical",
    *,
    depth: int = 3,
    opt: vqls.OptConfig | None = None,
    ortho_cutoff: float | None = None,
    target_n_q: int | None = None,
    compare_fidelities: bool = True,
) -> SMatrixResult:
    """Full pipeline: assemble blocks, orthogonalize (SJ), invert, assemble S.

    ``inverter`` is "classical" (direct dense inverse) or "vqls".  For
    the vqls path the classical inverse is still computed as the
    fidelity reference unless ``compare_fidelities`` is off.
    """
    if inverter not in ("classical", "vqls"):
        raise ValueError(f"unknown inverter {inverter!r}")
    mats = assemble(problem)
    if problem.kind == SECREST_JOHNSON:
        overlap = overlap_matrix(problem.basis, problem.channels)
        if target_n_q is not None:
            xform = orthogonalize_to_rank(overlap, target_n_q)
        else:
            xform = orthogonalize(
                overlap, DEFAULT_SJ_CUTOFF if ortho_cutoff is None else ortho_cutoff
            )
        mats = to_ortho(mats, xform)

    if inverter == "classical":
        m_inverse = np.linalg.inv(mats.m)
        fidelities = None
        tol = CLASSICAL_RESIDUAL_TOL
    else:
        if mats.m.shape[0] > 16:
            raise ValueError(
                f"variational inversion of a {mats.m.shape[0]}-dim block is "
                "impractical (Pauli term count grows as 4^n); reduce the "
                "basis or set target_n_q <= 16, or use the classical inverter"
            )
        oracle = np.linalg.inv(mats.m) if compare_fidelities else None
        result = vqls.invert(mats.m, depth, opt, oracle=oracle)
        m_inverse = result.m_inverse
        fidelities = result.fidelities
        tol = VQLS_RESIDUAL_TOL
    return assemble_s(
        mats,
        m_inverse,
        residual_tol=tol,
        inverter_label=inverter,
        fidelities=fidelities,
        energy=problem.channels.energy,
    )


def probabilities(result: SMatrixResult) -> np.ndarray:
    """Transition probabilities P_fi = |S_fi|^2."""
    return np.abs(result.s) ** 2
