"""Minimal exact statevector simulator.

Just enough machinery for variational linear-solver work: Y rotations,
CNOTs and X gates, the layered hardware-efficient ansatz, basis-state
preparation, and exact Pauli-string expectation values (no sampling).

Qubit 0 is the most significant bit of the statevector index, so
``prepare_b(k, n)`` puts the single nonzero amplitude at flat index k.
Gates are tuples: ("ry", qubit, angle), ("cx", control, target),
("x", qubit).
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_QUBITS = 14  # 2**14 amplitudes; desk-scale cap

_PAULI_LETTERS = frozenset("IXYZ")


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate program on n_qubits (validated at construction)."""

    n_qubits: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            kind = g[0]
            if kind == "ry":
                _, q, _theta = g
                self._check_qubit(q)
            elif kind == "x":
                _, q = g
                self._check_qubit(q)
            elif kind == "cx":
                _, c, t = g
                self._check_qubit(c)
                self._check_qubit(t)
                if c == t:
                    raise ValueError("cx control and target must differ")
            else:
                raise ValueError(f"unknown gate {kind!r}")

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n_qubits:
            raise ValueError(f"qubit {q} out of range for {self.n_qubits} qubits")


def _apply_ry(amp: np.ndarray, n: int, q: int, theta: float) -> None:
    """In-place exp(-i theta Y/2) on qubit q: [[c, -s], [s, c]]."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    view = amp.reshape(1 << q, 2, -1)
    v0 = view[:, 0].copy()
    view[:, 0] *= c
    view[:, 0] -= s * view[:, 1]
    view[:, 1] *= c
    view[:, 1] += s * v0


def _apply_x(amp: np.ndarray, n: int, q: int) -> None:
    view = amp.reshape(1 << q, 2, -1)
    view[:, [0, 1]] = view[:, [1, 0]]


def _apply_cx(amp: np.ndarray, n: int, c: int, t: int) -> None:
    q0, q1 = (c, t) if c < t else (t, c)
    view = amp.reshape(1 << q0, 2, 1 << (q1 - q0 - 1), 2, -1)
    if c < t:
        sub = view[:, 1]
        sub[:, :, [0, 1]] = sub[:, :, [1, 0]]
    else:
        sub = view[:, :, :, 1]
        sub[:, [0, 1]] = sub[:, [1, 0]]


def run(circuit: Circuit) -> StateVector:
    """Apply the circuit to |0...0> and return the final state."""
    n = circuit.n_qubits
    amp = np.zeros(1 << n, dtype=complex)
    amp[0] = 1.0
    for g in circuit.gates:
        if g[0] == "ry":
            _apply_ry(amp, n, g[1], g[2])
        elif g[0] == "cx":
            _apply_cx(amp, n, g[1], g[2])
        else:
            _apply_x(amp, n, g[1])
    return StateVector(n_qubits=n, amplitudes=amp)


def ansatz(n: int, depth: int, theta) -> Circuit:
    """Layered hardware-efficient ansatz.

    One initial column of Y rotations, then ``depth`` layers of a linear
    CNOT chain (0-1, 1-2, ...) followed by another rotation column;
    len(theta) must equal n * (depth + 1).
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (n * (depth + 1),):
        raise ValueError(
            f"theta must have length n*(depth+1)={n * (depth + 1)}, got {theta.size}"
        )
    gates = [("ry", q, float(theta[q])) for q in range(n)]
    for layer in range(1, depth + 1):
        gates.extend(("cx", q, q + 1) for q in range(n - 1))
        gates.extend(
            ("ry", q, float(theta[layer * n + q])) for q in range(n)
        )
    return Circuit(n_qubits=n, gates=tuple(gates))


def prepare_b(k: int, n: int) -> Circuit:
    """Circuit of X gates producing the computational basis state |k>."""
    if not 0 <= k < (1 << n):
        raise ValueError(f"basis index {k} out of range for {n} qubits")
    gates = tuple(
        ("x", q) for q in range(n) if (k >> (n - 1 - q)) & 1
    )
    return Circuit(n_qubits=n, gates=gates)


def _validate_pauli(p: str) -> None:
    if not p or set(p) - _PAULI_LETTERS:
        raise ValueError(f"invalid Pauli string {p!r}")


@lru_cache(maxsize=4096)
def pauli_action(p: str):
    """(perm, sign, scale) such that P v == scale * (sign * v)[perm].

    perm is index XOR with the X/Y flip mask; sign is (-1)^(parity of
    bits under Z/Y letters); scale = i^(#Y).
    """
    _validate_pauli(p)
    n = len(p)
    flip = 0
    phase_mask = 0
    n_y = 0
    for q, letter in enumerate(p):
        bit = 1 << (n - 1 - q)
        if letter in "XY":
            flip |= bit
        if letter in "ZY":
            phase_mask |= bit
        if letter == "Y":
            n_y += 1
    idx = np.arange(1 << n)
    parity = np.zeros(1 << n, dtype=np.int64)
    masked = idx & phase_mask
    for b in range(n):
        parity ^= (masked >> b) & 1
    sign = 1.0 - 2.0 * parity
    perm = idx ^ flip
    return perm, sign, 1j ** n_y


def apply_pauli(p: str, amplitudes: np.ndarray) -> np.ndarray:
    """P |psi> for a Pauli string acting on a raw amplitude array."""
    perm, sign, scale = pauli_action(p)
    if amplitudes.shape[0] != perm.shape[0]:
        raise ValueError("Pauli string length does not match state size")
    return scale * (sign * amplitudes)[perm]


def expectation(state: StateVector, p: str) -> float:
    """Exact <psi|P|psi>; real for any Pauli string on a normalized state."""
    if len(p) != state.n_qubits:
        raise ValueError("Pauli string length does not match qubit count")
    val = np.vdot(state.amplitudes, apply_pauli(p, state.amplitudes))
    return float(val.real)
