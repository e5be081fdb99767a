"""Experiment runner CLI: property-file parsing, GA + baseline orchestration,
and artifact output (CSV traces, circuit documents, QASM, SVG plot)."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .circuit import deserialize, export_qasm, random_circuit, serialize
from .engine import (
    GenerationRecord,
    RunConfig,
    evolve,
    make_rng_streams,
    random_baseline,
)
from .errors import ConfigurationError, ParseError, QcevolveError
from .fitness import (
    FidelityFitness,
    FitnessFunction,
    get_fitness_constructor,
    load_dataset,
)
from .gates import FULL_GATE_SET, parse_gate_set
from .simulator import fidelity, simulate


@dataclass(frozen=True)
class ExperimentSpec:
    run_config: RunConfig
    fitness_name: str = "fidelity"
    fitness_params: dict = None  # type: ignore[assignment]
    n_repeats: int = 1
    target_seeds: tuple[int, ...] = (0,)
    target_file: str | None = None
    target_gate_set: frozenset = FULL_GATE_SET
    output_dir: str = "runs"


def _parse_bool(value: str) -> bool:
    low = value.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {value}")


def _parse_int_list(value: str) -> tuple[int, ...]:
    return tuple(int(v.strip()) for v in value.split(",") if v.strip())


def _parse_float_list(value: str) -> tuple[float, ...]:
    return tuple(float(v.strip()) for v in value.split(",") if v.strip())


# key -> (destination, parser); destinations: run config, fitness, experiment
_RUN_KEYS = {
    "population_size": int,
    "generations": int,
    "n_qubits": int,
    "depth": int,
    "min_qubits": int,
    "max_qubits": int,
    "max_depth": int,
    "crossover_prob": float,
    "mutation_prob": float,
    "crossover_method": str,
    "crossover_points": int,
    "parent_selection": str,
    "survivor_selection": str,
    "tournament_size": int,
    "elitism": int,
    "gate_set": parse_gate_set,
    "mutation_weights": _parse_float_list,
    "seed": int,
    "children_per_generation": int,
}
_FITNESS_KEYS = {
    "fitness": str,
    "depth_weight": float,
    "dataset": str,
    "train_steps": int,
    "learning_rate": float,
    "train_seed": int,
    "lamarckian": _parse_bool,
}
_EXPERIMENT_KEYS = {
    "n_repeats": int,
    "target_seeds": _parse_int_list,
    "target_file": str,
    "target_gate_set": parse_gate_set,
    "output_dir": str,
}


def parse_config(path: str | Path) -> ExperimentSpec:
    """Parse a `key = value` property file into an ExperimentSpec."""
    run_kwargs: dict = {}
    fitness_kwargs: dict = {}
    exp_kwargs: dict = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from None
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        for table, kwargs in (
            (_RUN_KEYS, run_kwargs),
            (_FITNESS_KEYS, fitness_kwargs),
            (_EXPERIMENT_KEYS, exp_kwargs),
        ):
            if key in table:
                if key in kwargs:
                    raise ConfigurationError(f"{path}:{line_no}: duplicate key '{key}'")
                try:
                    kwargs[key] = table[key](value)
                except (ValueError, ConfigurationError) as exc:
                    raise ConfigurationError(
                        f"{path}:{line_no}: bad value for '{key}': {exc}"
                    ) from None
                break
        else:
            raise ConfigurationError(f"{path}:{line_no}: unknown key '{key}'")
    try:
        run_config = RunConfig(**run_kwargs).resolved()
    except ConfigurationError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    fitness_name = fitness_kwargs.pop("fitness", "fidelity")
    spec = ExperimentSpec(
        run_config=run_config,
        fitness_name=fitness_name,
        fitness_params=fitness_kwargs,
        **exp_kwargs,
    )
    if spec.n_repeats < 1:
        raise ConfigurationError(f"{path}: n_repeats must be >= 1")
    if spec.target_file is not None and "target_seeds" in exp_kwargs:
        raise ConfigurationError(
            f"{path}: target_seeds and target_file are mutually exclusive"
        )
    return spec


# ---------------------------------------------------------------------------
# statevector files


def write_statevector(state: np.ndarray, path: Path) -> None:
    lines = [f"{amp.real:.17g} {amp.imag:.17g}" for amp in state]
    path.write_text("\n".join(lines) + "\n")


def read_statevector(path: str | Path) -> np.ndarray:
    amps = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{line_no}: expected 're im'")
        try:
            amps.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise ParseError(f"{path}:{line_no}: not numeric") from None
    state = np.array(amps, dtype=complex)
    n = int(np.log2(len(state))) if len(state) else 0
    if len(state) == 0 or 2**n != len(state):
        raise ParseError(f"{path}: amplitude count {len(state)} is not a power of two")
    return state


# ---------------------------------------------------------------------------
# artifacts


def emit_trace_csv(trace: list[GenerationRecord], path: Path) -> None:
    if not trace:
        raise ValueError("trace is empty")
    rows = ["generation,best_fitness,mean_fitness,baseline_best_fitness"]
    for rec in trace:
        rows.append(
            f"{rec.generation},{rec.best_fitness:.17g},"
            f"{rec.mean_fitness:.17g},{rec.baseline_best_fitness:.17g}"
        )
    path.write_text("\n".join(rows) + "\n")


def _svg_path(xs: np.ndarray, ys: np.ndarray) -> str:
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))


def emit_convergence_svg(
    traces: list[list[GenerationRecord]], path: Path
) -> None:
    """Convergence plot: mean and 95% CI of best / average / baseline across runs."""
    if not traces:
        raise ValueError("no runs to plot")
    n_gen = min(len(t) for t in traces)
    gens = np.arange(n_gen)
    series = {
        "best": np.array([[r.best_fitness for r in t[:n_gen]] for t in traces]),
        "average": np.array([[r.mean_fitness for r in t[:n_gen]] for t in traces]),
        "random baseline": np.array(
            [[r.baseline_best_fitness for r in t[:n_gen]] for t in traces]
        ),
    }
    colors = {"best": "#1f77b4", "average": "#ff7f0e", "random baseline": "#2ca02c"}
    width, height = 640, 480
    left, right, top, bottom = 60, 620, 20, 440

    def to_x(g):
        span = max(n_gen - 1, 1)
        return left + (right - left) * g / span

    def to_y(v):
        v = np.clip(v, 0.0, 1.0)
        return bottom - (bottom - top) * v

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = to_y(frac)
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.0f}" font-size="12" '
            f'text-anchor="end">{frac:g}</text>'
        )
        parts.append(
            f'<line x1="{left}" y1="{y:.0f}" x2="{right}" y2="{y:.0f}" '
            f'stroke="#dddddd"/>'
        )
    for frac in (0.0, 0.5, 1.0):
        g = frac * (n_gen - 1)
        parts.append(
            f'<text x="{to_x(g):.0f}" y="{bottom + 18}" font-size="12" '
            f'text-anchor="middle">{g:.0f}</text>'
        )
    parts.append(
        f'<text x="{(left + right) / 2:.0f}" y="{height - 6}" font-size="13" '
        f'text-anchor="middle">generation</text>'
    )
    parts.append(
        f'<text x="16" y="{(top + bottom) / 2:.0f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 {(top + bottom) / 2:.0f})">'
        f"fitness</text>"
    )
    n_runs = len(traces)
    for i, (label, values) in enumerate(series.items()):
        mean = values.mean(axis=0)
        xs = np.array([to_x(g) for g in gens])
        ys = np.array([to_y(v) for v in mean])
        if n_runs >= 2:
            stderr = values.std(axis=0, ddof=1) / np.sqrt(n_runs)
            hi = np.array([to_y(v) for v in mean + 1.96 * stderr])
            lo = np.array([to_y(v) for v in mean - 1.96 * stderr])
            band = _svg_path(xs, hi) + " " + _svg_path(xs[::-1], lo[::-1])
            parts.append(
                f'<polygon points="{band}" fill="{colors[label]}" '
                f'fill-opacity="0.2" stroke="none"/>'
            )
        parts.append(
            f'<polyline points="{_svg_path(xs, ys)}" fill="none" '
            f'stroke="{colors[label]}" stroke-width="1.5"/>'
        )
        ly = top + 16 + 16 * i
        parts.append(
            f'<line x1="{left + 10}" y1="{ly}" x2="{left + 34}" y2="{ly}" '
            f'stroke="{colors[label]}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{left + 40}" y="{ly + 4}" font-size="12">{label}</text>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# experiment orchestration


def _build_targets(spec: ExperimentSpec) -> list[tuple[str, np.ndarray | None]]:
    cfg = spec.run_config
    if spec.fitness_name != "fidelity":
        return [("target0", None)]
    if spec.target_file is not None:
        state = read_statevector(spec.target_file)
        if len(state) != 2**cfg.n_qubits:
            raise ConfigurationError(
                f"target statevector has {len(state)} amplitudes, "
                f"expected {2 ** cfg.n_qubits}"
            )
        return [("target0", state)]
    targets = []
    for i, target_seed in enumerate(spec.target_seeds):
        rng = np.random.default_rng(target_seed)
        target_circuit = random_circuit(
            cfg.n_qubits, cfg.depth, spec.target_gate_set, rng
        )
        targets.append((f"target{i}", simulate(target_circuit)))
    return targets


def _make_fitness(spec: ExperimentSpec, target: np.ndarray | None) -> FitnessFunction:
    params = dict(spec.fitness_params or {})
    if spec.fitness_name == "fidelity":
        return FidelityFitness(
            target,
            depth_weight=params.pop("depth_weight", 0.0),
            max_depth=spec.run_config.resolved().max_depth,
        )
    ctor = get_fitness_constructor(spec.fitness_name)
    if spec.fitness_name == "ml":
        if "dataset" not in params:
            raise ConfigurationError("ml fitness requires a 'dataset' key")
        params["dataset"] = load_dataset(params["dataset"])
    return ctor(**params)


def run_experiment(spec: ExperimentSpec, quiet: bool = False) -> int:
    """Run GA + baseline for every target x repeat; write all artifacts."""
    cfg = spec.run_config.resolved()
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = _build_targets(spec)
    all_traces: list[list[GenerationRecord]] = []
    summary_rows = ["run,target,repeat,best_fitness,final_mean_fitness,baseline_best_fitness"]
    run_index = 0
    for t_idx, (target_name, target) in enumerate(targets):
        fitness_fn = _make_fitness(spec, target)
        for rep in range(spec.n_repeats):
            label = f"t{t_idx}r{rep}"
            streams = make_rng_streams(cfg.seed, [f"{label}/ga", f"{label}/baseline"])
            best, trace = evolve(cfg, fitness_fn, streams[f"{label}/ga"])
            baseline = random_baseline(cfg, fitness_fn, streams[f"{label}/baseline"])
            trace = [
                replace(rec, baseline_best_fitness=baseline[i])
                for i, rec in enumerate(trace)
            ]
            run_dir = out_dir / f"{target_name}_rep{rep}"
            run_dir.mkdir(parents=True, exist_ok=True)
            emit_trace_csv(trace, run_dir / "trace.csv")
            (run_dir / "best_circuit.json").write_text(serialize(best.circuit) + "\n")
            (run_dir / "best_circuit.qasm").write_text(export_qasm(best.circuit))
            if target is not None:
                write_statevector(target, run_dir / "target_state.txt")
            best_fit = max(rec.best_fitness for rec in trace)
            base_best = max(rec.baseline_best_fitness for rec in trace)
            summary_rows.append(
                f"{run_index},{t_idx},{rep},{best_fit:.17g},"
                f"{trace[-1].mean_fitness:.17g},{base_best:.17g}"
            )
            all_traces.append(trace)
            if not quiet:
                print(
                    f"{target_name} repeat {rep}: best={best_fit:.6f} "
                    f"baseline={base_best:.6f}"
                )
            run_index += 1
    (out_dir / "summary.csv").write_text("\n".join(summary_rows) + "\n")
    emit_convergence_svg(all_traces, out_dir / "convergence.svg")
    return 0


# ---------------------------------------------------------------------------
# entry point


def _cmd_run(args: argparse.Namespace) -> int:
    spec = parse_config(args.config)
    if args.seed is not None:
        spec = replace(spec, run_config=replace(spec.run_config, seed=args.seed))
    if args.out is not None:
        spec = replace(spec, output_dir=args.out)
    return run_experiment(spec, quiet=args.quiet)


def _cmd_eval(args: argparse.Namespace) -> int:
    circ = deserialize(Path(args.circuit).read_text())
    target = read_statevector(args.target)
    score = fidelity(simulate(circ), target)
    print(f"fidelity = {score:.12f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qcevolve",
        description="Evolve quantum circuits with a genetic algorithm",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment from a property file")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=_cmd_run)
    p_eval = sub.add_parser("eval", help="score one circuit against a target state")
    p_eval.add_argument("circuit")
    p_eval.add_argument("--target", required=True)
    p_eval.set_defaults(func=_cmd_eval)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QcevolveError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
