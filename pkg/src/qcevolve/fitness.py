"""Objective functions scoring circuits, plus the fitness registry.

User-defined objectives register a constructor under a unique name and
become selectable from the property file like the built-ins.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi
from typing import Callable

import numpy as np

from .circuit import Circuit, Gate
from .errors import ConfigurationError
from .simulator import (
    apply_gate,
    fidelity,
    n_qubits_of,
    partial_trace,
    simulate,
    von_neumann_entropy,
    zero_state,
)
from .gates import GateKind


class FitnessFunction:
    """Base class: a deterministic Circuit -> float evaluator."""

    name = "abstract"

    def evaluate(self, circuit: Circuit) -> float:
        raise NotImplementedError

    def describe(self) -> str:
        return self.name


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray  # (n_samples, n_features)
    labels: np.ndarray  # (n_samples,), values in {0, 1}

    def __post_init__(self):
        if self.features.ndim != 2 or len(self.features) == 0:
            raise ConfigurationError("dataset must be a nonempty 2D feature array")
        if len(self.labels) != len(self.features):
            raise ConfigurationError("dataset features and labels disagree in length")
        if not set(np.unique(self.labels)) <= {0, 1}:
            raise ConfigurationError("dataset labels must be 0 or 1")


def load_dataset(path: str) -> Dataset:
    """CSV: one sample per line, features then a 0/1 label; optional header."""
    rows = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                if line_no == 1:
                    continue  # header line
                raise ConfigurationError(
                    f"{path}:{line_no}: not a numeric sample"
                ) from None
    if not rows:
        raise ConfigurationError(f"{path}: no samples")
    data = np.array(rows)
    return Dataset(data[:, :-1], data[:, -1].astype(int))


# ---------------------------------------------------------------------------
# built-in objectives


def fidelity_fitness(
    circuit: Circuit,
    target: np.ndarray,
    depth_weight: float = 0.0,
    max_depth: int = 100,
) -> float:
    """Fidelity to `target`, minus an optional linear depth penalty."""
    if 2**circuit.n_qubits != len(target):
        raise ConfigurationError(
            f"circuit has {circuit.n_qubits} qubits but target has "
            f"{n_qubits_of(target)}"
        )
    score = fidelity(simulate(circuit), target)
    if depth_weight:
        score -= depth_weight * circuit.depth / max_depth
    return score


def entanglement_fitness(circuit: Circuit) -> float:
    """Mean single-qubit marginal entropy; 1.0 for Bell/GHZ-like states."""
    if circuit.n_qubits < 2:
        raise ConfigurationError("entanglement fitness needs at least 2 qubits")
    state = simulate(circuit)
    entropies = [
        von_neumann_entropy(partial_trace(state, {k}))
        for k in range(circuit.n_qubits)
    ]
    return float(np.mean(entropies))


class FidelityFitness(FitnessFunction):
    name = "fidelity"

    def __init__(self, target: np.ndarray, depth_weight: float = 0.0, max_depth: int = 100):
        self.target = target
        self.depth_weight = depth_weight
        self.max_depth = max_depth

    def evaluate(self, circuit: Circuit) -> float:
        return fidelity_fitness(circuit, self.target, self.depth_weight, self.max_depth)

    def describe(self) -> str:
        return f"fidelity(depth_weight={self.depth_weight})"


class EntanglementFitness(FitnessFunction):
    name = "entanglement"

    def evaluate(self, circuit: Circuit) -> float:
        return entanglement_fitness(circuit)


# ---------------------------------------------------------------------------
# machine-learning fitness


def _theta_cells(circuit: Circuit) -> list[tuple[int, int]]:
    return [
        (r, c)
        for r in range(circuit.n_qubits)
        for c in range(circuit.depth)
        if circuit.grid[r][c].theta is not None
    ]


def _with_thetas(
    circuit: Circuit, cells: list[tuple[int, int]], thetas: np.ndarray
) -> Circuit:
    grid = [list(row) for row in circuit.grid]
    for (r, c), t in zip(cells, thetas):
        g = grid[r][c]
        grid[r][c] = Gate(g.kind, g.role, float(t), g.partner)
    return Circuit(circuit.n_qubits, tuple(tuple(row) for row in grid))


def _encode_features(n_qubits: int, features: np.ndarray) -> np.ndarray:
    """Angle encoding: RX(pi * x_j) on qubit j from the zero state."""
    state = zero_state(n_qubits)
    for j, x in enumerate(features):
        state = apply_gate(state, GateKind.RX, pi * float(x), (j,))
    return state


def _run_from(state: np.ndarray, circuit: Circuit) -> np.ndarray:
    from .simulator import run_gates

    return run_gates(state, circuit)


def _z0_expectation(state: np.ndarray) -> float:
    probs = np.abs(state) ** 2
    signs = 1.0 - 2.0 * (np.arange(len(state)) & 1)
    return float(np.dot(probs, signs))


def _predictions(circuit: Circuit, dataset: Dataset) -> np.ndarray:
    """<Z_0> of the final state per sample; label 0 iff the value is >= 0."""
    return np.array(
        [
            _z0_expectation(_run_from(_encode_features(circuit.n_qubits, x), circuit))
            for x in dataset.features
        ]
    )


def _accuracy(predictions: np.ndarray, labels: np.ndarray) -> float:
    predicted = (predictions < 0).astype(int)
    return float(np.mean(predicted == labels))


def _mse_loss(predictions: np.ndarray, labels: np.ndarray) -> float:
    signed = 1.0 - 2.0 * labels  # label 0 -> +1, label 1 -> -1
    return float(np.mean((predictions - signed) ** 2))


def ml_fitness(
    circuit: Circuit,
    dataset: Dataset,
    train_steps: int = 100,
    learning_rate: float = 0.2,
    train_seed: int = 0,
) -> float:
    """Training accuracy after finite-difference gradient descent."""
    score, _ = ml_fitness_trained(
        circuit, dataset, train_steps, learning_rate, train_seed
    )
    return score


def ml_fitness_trained(
    circuit: Circuit,
    dataset: Dataset,
    train_steps: int = 100,
    learning_rate: float = 0.2,
    train_seed: int = 0,
    fd_step: float = 1e-3,
) -> tuple[float, Circuit]:
    """Train the rotation angles; return (accuracy, trained circuit).

    Central finite differences and plain gradient descent on the
    mean-squared error of the <Z_0> predictor against +-1 labels.
    The input circuit is never modified.
    """
    if dataset.features.shape[1] > circuit.n_qubits:
        raise ConfigurationError(
            f"{dataset.features.shape[1]} features exceed {circuit.n_qubits} qubits"
        )
    cells = _theta_cells(circuit)
    if not cells or train_steps == 0:
        return _accuracy(_predictions(circuit, dataset), dataset.labels), circuit
    thetas = np.array([circuit.grid[r][c].theta for r, c in cells])

    def loss(vec: np.ndarray) -> float:
        trial = _with_thetas(circuit, cells, vec)
        return _mse_loss(_predictions(trial, dataset), dataset.labels)

    for _ in range(train_steps):
        grad = np.empty_like(thetas)
        for i in range(len(thetas)):
            up = thetas.copy()
            up[i] += fd_step
            down = thetas.copy()
            down[i] -= fd_step
            grad[i] = (loss(up) - loss(down)) / (2 * fd_step)
        thetas = thetas - learning_rate * grad
    trained = _with_thetas(circuit, cells, thetas)
    return _accuracy(_predictions(trained, dataset), dataset.labels), trained


class MLFitness(FitnessFunction):
    name = "ml"

    def __init__(
        self,
        dataset: Dataset,
        train_steps: int = 100,
        learning_rate: float = 0.2,
        train_seed: int = 0,
        lamarckian: bool = True,
    ):
        self.dataset = dataset
        self.train_steps = train_steps
        self.learning_rate = learning_rate
        self.train_seed = train_seed
        self.lamarckian = lamarckian

    def evaluate(self, circuit: Circuit) -> float:
        return self.evaluate_trained(circuit)[0]

    def evaluate_trained(self, circuit: Circuit) -> tuple[float, Circuit]:
        return ml_fitness_trained(
            circuit,
            self.dataset,
            self.train_steps,
            self.learning_rate,
            self.train_seed,
        )

    def describe(self) -> str:
        return (
            f"ml(train_steps={self.train_steps}, lr={self.learning_rate}, "
            f"seed={self.train_seed}, lamarckian={self.lamarckian})"
        )


# ---------------------------------------------------------------------------
# registry

_REGISTRY: dict[str, Callable[..., FitnessFunction]] = {}


def register_fitness(name: str, constructor: Callable[..., FitnessFunction]) -> None:
    if name in _REGISTRY:
        raise ConfigurationError(f"fitness '{name}' is already registered")
    _REGISTRY[name] = constructor


def get_fitness_constructor(name: str) -> Callable[..., FitnessFunction]:
    if name not in _REGISTRY:
        known = ", ".join(sorted(_REGISTRY))
        raise ConfigurationError(f"unknown fitness '{name}' (known: {known})")
    return _REGISTRY[name]


def registered_names() -> list[str]:
    return sorted(_REGISTRY)


register_fitness("fidelity", FidelityFitness)
register_fitness("entanglement", lambda: EntanglementFitness())
register_fitness("ml", MLFitness)
