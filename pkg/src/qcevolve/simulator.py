"""Dense statevector simulation and quantum-information quantities.

Bit ordering is little-endian: qubit k is bit k of the amplitude index
(index = sum q_k * 2^k), so in a reshaped [2]*n tensor qubit k lives on
axis n-1-k.
"""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, Role, validate
from .errors import CircuitStructureError, ConfigurationError
from .gates import GateKind, gate_matrix

MAX_QUBITS = 20

NORM_ATOL = 1e-9


def zero_state(n_qubits: int) -> np.ndarray:
    """The |0...0> statevector on `n_qubits` qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"n_qubits {n_qubits} out of range [1, {MAX_QUBITS}]")
    state = np.zeros(2**n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def n_qubits_of(state: np.ndarray) -> int:
    n = int(np.log2(len(state)))
    if 2**n != len(state):
        raise ValueError(f"statevector length {len(state)} is not a power of two")
    return n


def apply_gate(
    state: np.ndarray,
    kind: GateKind,
    theta: float | None,
    targets: tuple[int, ...],
) -> np.ndarray:
    """Apply `kind` on `targets` (control first for CX/CZ)."""
    n = n_qubits_of(state)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    if any(not 0 <= q < n for q in targets):
        raise ValueError(f"targets {targets} out of range for {n} qubits")
    if len(targets) != kind.arity:
        raise ValueError(f"{kind.value} needs {kind.arity} targets, got {len(targets)}")
    matrix = gate_matrix(kind, theta)
    k = len(targets)
    psi = state.reshape([2] * n)
    axes = [n - 1 - q for q in targets]
    out = np.tensordot(
        matrix.reshape([2] * (2 * k)), psi, axes=(list(range(k, 2 * k)), axes)
    )
    return np.moveaxis(out, range(k), axes).reshape(-1)


def _apply_1q_fast(state: np.ndarray, matrix: np.ndarray, q: int) -> np.ndarray:
    # little-endian: qubit q splits the flat index as (high, bit q, low)
    m = state.reshape(-1, 2, 1 << q)
    return np.matmul(matrix, m).reshape(-1)


def _apply_cx_fast(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    psi = state.reshape([2] * n)
    i10 = [slice(None)] * n
    i10[n - 1 - control] = 1
    i11 = list(i10)
    i10[n - 1 - target] = 0
    i11[n - 1 - target] = 1
    new = psi.copy()
    new[tuple(i10)] = psi[tuple(i11)]
    new[tuple(i11)] = psi[tuple(i10)]
    return new.reshape(-1)


def _apply_cz_fast(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    psi = state.reshape([2] * n).copy()
    i11 = [slice(None)] * n
    i11[n - 1 - control] = 1
    i11[n - 1 - target] = 1
    psi[tuple(i11)] *= -1
    return psi.reshape(-1)


def run_gates(state: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Apply a validated circuit to an arbitrary start state."""
    n = circuit.n_qubits
    for c in range(circuit.depth):
        for r in range(n):
            g = circuit.grid[r][c]
            kind = g.kind
            if kind is GateKind.ID:
                continue
            if kind is GateKind.CX:
                if g.role is Role.CONTROL:
                    state = _apply_cx_fast(state, r, g.partner, n)
            elif kind is GateKind.CZ:
                if g.role is Role.CONTROL:
                    state = _apply_cz_fast(state, r, g.partner, n)
            else:
                state = _apply_1q_fast(state, gate_matrix(kind, g.theta), r)
    return state


def simulate(circuit: Circuit) -> np.ndarray:
    """Run the circuit column by column from the zero state."""
    try:
        validate(circuit)
    except CircuitStructureError:
        raise
    return run_gates(zero_state(circuit.n_qubits), circuit)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Squared overlap |<a|b>|^2 between two pure states."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return float(np.abs(np.vdot(a, b)) ** 2)


def partial_trace(state: np.ndarray, keep: set[int] | list[int]) -> np.ndarray:
    """Reduced density matrix over `keep` (little-endian over sorted keep)."""
    n = n_qubits_of(state)
    keep = sorted(set(keep))
    if not keep or len(keep) >= n:
        raise ValueError("keep must be a nonempty proper subset of the qubits")
    if any(not 0 <= q < n for q in keep):
        raise ValueError(f"keep {keep} out of range for {n} qubits")
    axes_keep = [n - 1 - q for q in reversed(keep)]
    axes_out = [a for a in range(n) if a not in axes_keep]
    psi = state.reshape([2] * n).transpose(axes_keep + axes_out)
    psi = psi.reshape(2 ** len(keep), -1)
    return psi @ psi.conj().T


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy -sum(lam * log2 lam) of a density matrix, in bits."""
    if not np.allclose(rho, rho.conj().T, atol=1e-8):
        raise ValueError("density matrix is not Hermitian")
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-12]  # clamp numerical negatives / zeros
    return float(-np.sum(lam * np.log2(lam)))
