"""Selection, crossover, and mutation operators over circuit populations."""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .circuit import (
    IDENTITY,
    Circuit,
    Gate,
    Role,
    from_columns,
    pad_to,
    random_column,
    repair,
)
from .errors import ConfigurationError
from .gates import GateKind


@dataclass(frozen=True)
class Individual:
    circuit: Circuit
    fitness: float | None = None


@dataclass
class Population:
    members: list[Individual]
    generation_index: int = 0


# ---------------------------------------------------------------------------
# selection


def select_random(
    pop: Population, count: int, rng: np.random.Generator
) -> list[Individual]:
    """Uniform selection with replacement; fitness is ignored."""
    if not pop.members:
        raise ValueError("population is empty")
    if count < 1:
        raise ValueError(f"count {count} must be >= 1")
    idx = rng.integers(len(pop.members), size=count)
    return [pop.members[i] for i in idx]


def _tournament_winner(
    members: list[Individual], idx: np.ndarray, rng: np.random.Generator
) -> Individual:
    fits = [members[i].fitness for i in idx]
    best = max(fits)
    winners = [i for i, f in zip(idx, fits) if f == best]
    return members[winners[rng.integers(len(winners))]]


def select_tournament(
    pop: Population,
    count: int,
    tournament_size: int,
    rng: np.random.Generator,
) -> list[Individual]:
    """Best-of-sample selection; sampling with replacement, ties random."""
    if not pop.members:
        raise ValueError("population is empty")
    if count < 1:
        raise ValueError(f"count {count} must be >= 1")
    if tournament_size < 1:
        raise ValueError(f"tournament_size {tournament_size} must be >= 1")
    draws = rng.integers(len(pop.members), size=(count, tournament_size))
    return [_tournament_winner(pop.members, row, rng) for row in draws]


def select_roulette(
    pop: Population, count: int, rng: np.random.Generator
) -> list[Individual]:
    """Fitness-proportionate selection on shifted weights."""
    if not pop.members:
        raise ValueError("population is empty")
    if count < 1:
        raise ValueError(f"count {count} must be >= 1")
    if any(m.fitness is None for m in pop.members):
        raise ValueError("roulette selection requires evaluated fitness")
    fits = np.array([m.fitness for m in pop.members], dtype=float)
    lo, hi = fits.min(), fits.max()
    # shift only negative fitness into range; a tiny floor keeps the
    # distribution valid when every weight lands on zero
    shift = -lo if lo < 0 else 0.0
    weights = fits + shift + 1e-9 * (hi - lo + 1.0)
    probs = weights / weights.sum()
    idx = rng.choice(len(pop.members), size=count, p=probs)
    return [pop.members[i] for i in idx]


# ---------------------------------------------------------------------------
# crossover


def _pad_pair(a: Circuit, b: Circuit) -> tuple[Circuit, Circuit]:
    n = max(a.n_qubits, b.n_qubits)
    m = max(a.depth, b.depth)
    return pad_to(a, n, m), pad_to(b, n, m)


def _recombine(
    a: Circuit, b: Circuit, cuts: list[int], rng: np.random.Generator
) -> tuple[Circuit, Circuit]:
    bounds = [0] + cuts + [a.depth]
    cols1, cols2 = [], []
    for seg, (lo, hi) in enumerate(zip(bounds, bounds[1:])):
        src1, src2 = (a, b) if seg % 2 == 0 else (b, a)
        cols1.extend(src1.column(c) for c in range(lo, hi))
        cols2.extend(src2.column(c) for c in range(lo, hi))
    c1 = repair(from_columns(a.n_qubits, cols1), rng)
    c2 = repair(from_columns(a.n_qubits, cols2), rng)
    return c1, c2


def crossover_single_point(
    a: Circuit, b: Circuit, rng: np.random.Generator
) -> tuple[Circuit, Circuit]:
    """Swap all columns after one random cut point."""
    a, b = _pad_pair(a, b)
    if a.depth < 2:
        return a, b
    cut = int(rng.integers(1, a.depth))
    return _recombine(a, b, [cut], rng)


def crossover_multi_point(
    a: Circuit, b: Circuit, n_points: int, rng: np.random.Generator
) -> tuple[Circuit, Circuit]:
    """Alternate column segments between parents at several cut points."""
    a, b = _pad_pair(a, b)
    if not 2 <= n_points <= a.depth - 1:
        raise ConfigurationError(
            f"n_points {n_points} infeasible for depth {a.depth}"
        )
    cuts = sorted(
        int(c) + 1 for c in rng.choice(a.depth - 1, size=n_points, replace=False)
    )
    return _recombine(a, b, cuts, rng)


def crossover_blockwise(
    a: Circuit, b: Circuit, rng: np.random.Generator
) -> tuple[Circuit, Circuit]:
    """Swap the top-left quadrant defined by one row cut and one column cut.

    Two-qubit gates spanning the row cut break; repair() reconstructs them,
    so children may gain gate content relative to the parents.
    """
    a, b = _pad_pair(a, b)
    if a.n_qubits < 2:
        return crossover_single_point(a, b, rng)
    if a.depth < 2:
        return a, b
    row_cut = int(rng.integers(1, a.n_qubits))
    col_cut = int(rng.integers(1, a.depth))
    grid1 = [list(row) for row in a.grid]
    grid2 = [list(row) for row in b.grid]
    for r in range(row_cut):
        for c in range(col_cut):
            grid1[r][c], grid2[r][c] = grid2[r][c], grid1[r][c]
    c1 = repair(Circuit(a.n_qubits, tuple(tuple(r) for r in grid1)), rng)
    c2 = repair(Circuit(a.n_qubits, tuple(tuple(r) for r in grid2)), rng)
    return c1, c2


# ---------------------------------------------------------------------------
# mutation


@dataclass(frozen=True)
class MutationContext:
    """Parameters the individual mutation methods draw on."""

    gate_set: frozenset[GateKind]
    min_qubits: int = 1
    max_qubits: int = 20
    max_depth: int = 100
    parameter_sigma: float = 0.1 * pi


def mutate_single_gate_flip(
    circuit: Circuit, rng: np.random.Generator, ctx: MutationContext
) -> Circuit:
    """Replace one randomly chosen gate (both cells of a two-qubit gate)."""
    n, m = circuit.n_qubits, circuit.depth
    r = int(rng.integers(n))
    c = int(rng.integers(m))
    hit = circuit.grid[r][c]
    rows = [r] if hit.kind.arity == 1 else [r, hit.partner]
    grid = [list(row) for row in circuit.grid]
    for row in rows:
        grid[row][c] = IDENTITY
    one_q = sorted((k for k in gate_set_of(ctx) if k.arity == 1), key=lambda k: k.value)
    two_q = sorted((k for k in gate_set_of(ctx) if k.arity == 2), key=lambda k: k.value)
    for row in rows:
        if grid[row][c].kind is not GateKind.ID or grid[row][c].role is not Role.SINGLE:
            continue  # already claimed by a freshly placed two-qubit gate
        free_other = [
            i for i in range(n) if i != row and grid[i][c].kind is GateKind.ID
        ]
        choices: list[GateKind] = list(one_q)
        if free_other and two_q:
            choices += two_q
        if not choices:
            continue
        kind = choices[rng.integers(len(choices))]
        if kind.arity == 1:
            theta = float(rng.uniform(-pi, pi)) if kind.parameterized else None
            grid[row][c] = Gate(kind, Role.SINGLE, theta)
        else:
            other = free_other[rng.integers(len(free_other))]
            ctrl, tgt = (row, other) if rng.random() < 0.5 else (other, row)
            grid[ctrl][c] = Gate(kind, Role.CONTROL, partner=tgt)
            grid[tgt][c] = Gate(kind, Role.TARGET, partner=ctrl)
    return Circuit(n, tuple(tuple(row) for row in grid))


def gate_set_of(ctx: MutationContext) -> frozenset[GateKind]:
    return ctx.gate_set | {GateKind.ID}


def mutate_swap_control(
    circuit: Circuit, rng: np.random.Generator, ctx: MutationContext
) -> Circuit:
    """Swap control and target of one random controlled gate, if any."""
    controls = [
        (r, c)
        for r in range(circuit.n_qubits)
        for c in range(circuit.depth)
        if circuit.grid[r][c].role is Role.CONTROL
    ]
    if not controls:
        return circuit
    r, c = controls[rng.integers(len(controls))]
    g = circuit.grid[r][c]
    p = g.partner
    grid = [list(row) for row in circuit.grid]
    grid[r][c] = Gate(g.kind, Role.TARGET, partner=p)
    grid[p][c] = Gate(g.kind, Role.CONTROL, partner=r)
    return Circuit(circuit.n_qubits, tuple(tuple(row) for row in grid))


def mutate_qubit_count(
    circuit: Circuit, rng: np.random.Generator, ctx: MutationContext
) -> Circuit:
    """Add a fresh identity row or drop a random row, within bounds."""
    n = circuit.n_qubits
    can_add = n < ctx.max_qubits
    can_remove = n > max(ctx.min_qubits, 1)
    if not can_add and not can_remove:
        return circuit
    add = can_add and (not can_remove or rng.random() < 0.5)
    if add:
        new_row = tuple(IDENTITY for _ in range(circuit.depth))
        return Circuit(n + 1, circuit.grid + (new_row,))
    drop = int(rng.integers(n))
    grid = []
    for r in range(n):
        if r == drop:
            continue
        row = []
        for g in circuit.grid[r]:
            p = g.partner
            if p is not None and p > drop:
                p = p - 1
            elif p == drop:
                p = None  # dangling, fixed by repair below
            row.append(Gate(g.kind, g.role, g.theta, p))
        grid.append(tuple(row))
    return repair(Circuit(n - 1, tuple(grid)), rng)


def mutate_gate_count(
    circuit: Circuit, rng: np.random.Generator, ctx: MutationContext
) -> Circuit:
    """Insert a random column or remove one, keeping the grid rectangular."""
    m = circuit.depth
    can_add = m < ctx.max_depth
    can_remove = m > 1
    if not can_add and not can_remove:
        return circuit
    add = can_add and (not can_remove or rng.random() < 0.5)
    cols = [circuit.column(c) for c in range(m)]
    if add:
        pos = int(rng.integers(m + 1))
        cols.insert(pos, random_column(circuit.n_qubits, gate_set_of(ctx), rng))
    else:
        cols.pop(int(rng.integers(m)))
    return from_columns(circuit.n_qubits, cols)


def mutate_swap_columns(
    circuit: Circuit, rng: np.random.Generator, ctx: MutationContext
) -> Circuit:
    """Exchange the gates of two randomly chosen columns."""
    m = circuit.depth
    if m < 2:
        return circuit
    c1, c2 = rng.choice(m, size=2, replace=False)
    cols = [circuit.column(c) for c in range(m)]
    cols[c1], cols[c2] = cols[c2], cols[c1]
    return from_columns(circuit.n_qubits, cols)


def mutate_parameter(
    circuit: Circuit, rng: np.random.Generator, ctx: MutationContext
) -> Circuit:
    """Jitter one rotation angle with Gaussian noise, if any gate has one."""
    cells = [
        (r, c)
        for r in range(circuit.n_qubits)
        for c in range(circuit.depth)
        if circuit.grid[r][c].theta is not None
    ]
    if not cells:
        return circuit
    r, c = cells[rng.integers(len(cells))]
    g = circuit.grid[r][c]
    grid = [list(row) for row in circuit.grid]
    grid[r][c] = Gate(
        g.kind, g.role, g.theta + float(rng.normal(0.0, ctx.parameter_sigma)), g.partner
    )
    return Circuit(circuit.n_qubits, tuple(tuple(row) for row in grid))


MUTATION_METHODS = (
    mutate_single_gate_flip,
    mutate_swap_control,
    mutate_qubit_count,
    mutate_gate_count,
    mutate_swap_columns,
    mutate_parameter,
)

MUTATION_NAMES = tuple(f.__name__.removeprefix("mutate_") for f in MUTATION_METHODS)


def mutate(
    circuit: Circuit,
    rng: np.random.Generator,
    ctx: MutationContext,
    weights: list[float] | None = None,
) -> Circuit:
    """Apply exactly one mutation method, chosen with probability ~ weights."""
    if weights is None:
        weights = [1.0] * len(MUTATION_METHODS)
    if len(weights) != len(MUTATION_METHODS):
        raise ConfigurationError(
            f"need {len(MUTATION_METHODS)} mutation weights, got {len(weights)}"
        )
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or w.sum() <= 0:
        raise ConfigurationError("mutation weights must be nonnegative, not all zero")
    method = MUTATION_METHODS[rng.choice(len(MUTATION_METHODS), p=w / w.sum())]
    return method(circuit, rng, ctx)
