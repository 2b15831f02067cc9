"""Config-driven experiment runner with deterministic, resumable output.

An experiment sweeps (strategy, beta, sigma2, m) cells over one graph.  Each
cell draws fresh samples for ``trials`` synthesized signals, recovers with
the projection estimator at the bandwidth-rule cutoff, and reports the mean
squared error with its standard error.  Everything derives from the master
seed: rerunning the same config reproduces results.csv byte for byte.

Noise streams are paired across strategies (same trial, same noise
sequence) while index draws stay independent per strategy; this narrows
strategy comparisons without changing any mean.

Completed cells are appended to ``results.partial.jsonl`` as they finish,
so an interrupted run resumes instead of recomputing.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError
from .graphs import GENERATORS, generate_graph, normalize_shift, spectral_decompose
from .recovery import bandwidth_rule, sample_proj
from .sampling import STRATEGIES, draw_samples, make_scores, mix_seed
from .signals import synthesize_signal

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

# seed-stream tags: signals, index draws, noise
_TAG_SIGNAL, _TAG_INDEX, _TAG_NOISE = 0x51, 0xC3, 0xE7

STRATEGY_COLORS = {
    "uniform": "#1f77b4",
    "leverage": "#ff7f0e",
    "sqrt_leverage": "#9467bd",
    "degree": "#d62728",
    "optimal": "#2ca02c",
}


@dataclass(frozen=True)
class GraphSpec:
    kind: str
    n: int
    params: dict = field(default_factory=dict)
    seed: int = 0


@dataclass(frozen=True)
class SignalSpec:
    bandwidth: int
    betas: tuple
    count: int


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GraphSpec
    signal: SignalSpec
    sigma2: tuple
    strategies: tuple
    m_grid: tuple
    trials: int
    master_seed: int
    out_dir: str | None = None
    k_min: int = 10


@dataclass(frozen=True)
class ResultRow:
    """One sweep cell; field order is the CSV schema."""

    graph_kind: str
    n: int
    strategy: str
    beta: float
    sigma2: float
    m: int
    kappa: int
    mse_mean: float
    mse_stderr: float
    trials: int
    seed: int


CSV_FIELDS = tuple(ResultRow.__dataclass_fields__)


def validate_config(config: ExperimentConfig) -> None:
    if config.graph.kind not in GENERATORS:
        raise ConfigError("graph.kind", f"unknown kind {config.graph.kind!r}")
    if config.graph.n < 2:
        raise ConfigError("graph.n", "need at least 2 nodes")
    if config.signal.bandwidth < 1:
        raise ConfigError("signal.bandwidth", "must be at least 1")
    if config.signal.count < 1:
        raise ConfigError("signal.count", "must be at least 1")
    if not config.signal.betas:
        raise ConfigError("signal.betas", "must be nonempty")
    for b in config.signal.betas:
        if b < 0.5:
            raise ConfigError("signal.betas", f"beta {b} below 0.5")
        if b < 1.0:
            warnings.warn(
                f"beta={b} is below 1; the tail-budget class is usually stated "
                "for beta >= 1",
                stacklevel=2,
            )
    if not config.sigma2 or any(s < 0 for s in config.sigma2):
        raise ConfigError("sweep.sigma2", "must be a nonempty list of nonnegative values")
    if not config.strategies:
        raise ConfigError("sweep.strategies", "must be nonempty")
    for s in config.strategies:
        if s not in STRATEGIES:
            raise ConfigError("sweep.strategies", f"unknown strategy {s!r}")
    if not config.m_grid or any(m < 1 for m in config.m_grid):
        raise ConfigError("sweep.m_grid", "must be a nonempty list of positive ints")
    if any(b <= a for a, b in zip(config.m_grid, config.m_grid[1:])):
        raise ConfigError("sweep.m_grid", "must be strictly increasing")
    if config.trials < 1:
        raise ConfigError("sweep.trials", "must be at least 1")
    if config.k_min < 1:
        raise ConfigError("run.k_min", "must be at least 1")


def _take(section: dict, path: str, allowed: set) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown key")


def config_from_dict(doc: dict) -> ExperimentConfig:
    _take(doc, "config", {"graph", "signal", "sweep", "run"})
    for name in ("graph", "signal", "sweep", "run"):
        if name not in doc:
            raise ConfigError(name, "missing section")
        if not isinstance(doc[name], dict):
            raise ConfigError(name, "must be a table")

    g = doc["graph"]
    _take(g, "graph", {"kind", "n", "seed", "params"})
    try:
        graph = GraphSpec(
            kind=str(g["kind"]),
            n=int(g["n"]),
            params=dict(g.get("params", {})),
            seed=int(g.get("seed", 0)),
        )
    except KeyError as exc:
        raise ConfigError(f"graph.{exc.args[0]}", "missing") from None

    s = doc["signal"]
    _take(s, "signal", {"bandwidth", "betas", "count"})
    try:
        signal = SignalSpec(
            bandwidth=int(s["bandwidth"]),
            betas=tuple(float(b) for b in s["betas"]),
            count=int(s["count"]),
        )
    except KeyError as exc:
        raise ConfigError(f"signal.{exc.args[0]}", "missing") from None

    w = doc["sweep"]
    _take(w, "sweep", {"sigma2", "strategies", "m_grid", "trials"})
    try:
        sigma2 = tuple(float(v) for v in w["sigma2"])
        strategies = tuple(str(v) for v in w["strategies"])
        m_grid = tuple(int(v) for v in w["m_grid"])
        trials = int(w["trials"])
    except KeyError as exc:
        raise ConfigError(f"sweep.{exc.args[0]}", "missing") from None

    r = doc["run"]
    _take(r, "run", {"master_seed", "out_dir", "k_min"})
    try:
        master_seed = int(r["master_seed"])
    except KeyError:
        raise ConfigError("run.master_seed", "missing") from None

    config = ExperimentConfig(
        graph=graph,
        signal=signal,
        sigma2=sigma2,
        strategies=strategies,
        m_grid=m_grid,
        trials=trials,
        master_seed=master_seed,
        out_dir=r.get("out_dir"),
        k_min=int(r.get("k_min", 10)),
    )
    validate_config(config)
    return config


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(str(path), f"not valid TOML: {exc}") from exc
    return config_from_dict(doc)


def config_digest(config: ExperimentConfig) -> str:
    """Hash of everything that determines results (the output dir does not)."""
    doc = asdict(config)
    doc.pop("out_dir", None)
    blob = json.dumps(doc, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _worker_count(cells: int) -> int:
    cap = os.environ.get("GRAPHSAMP_THREADS", "1")
    try:
        cap = max(1, int(cap))
    except ValueError:
        cap = 1
    return max(1, min(cap, cells))


def run_experiment(config: ExperimentConfig, out_dir=None) -> list[ResultRow]:
    """Run every sweep cell and return one row per cell, in sweep order.

    Cell failures are recorded as NaN means rather than raised, so one bad
    cell does not lose a sweep.  When an output directory is available
    (argument or config), completed cells stream to a partial file that a
    rerun of the identical config picks up.
    """
    validate_config(config)
    out = Path(out_dir) if out_dir is not None else (
        Path(config.out_dir) if config.out_dir else None
    )

    graph = generate_graph(config.graph.kind, {"n": config.graph.n, **config.graph.params},
                           config.graph.seed)
    basis = spectral_decompose(normalize_shift(graph))

    pools = {
        b_idx: [
            synthesize_signal(
                basis,
                config.signal.bandwidth,
                beta,
                seed=mix_seed(config.master_seed, _TAG_SIGNAL, b_idx, j),
            )
            for j in range(config.signal.count)
        ]
        for b_idx, beta in enumerate(config.signal.betas)
    }

    cells = [
        (s_idx, strategy, b_idx, beta, g_idx, sigma2, m_idx, m)
        for s_idx, strategy in enumerate(config.strategies)
        for b_idx, beta in enumerate(config.signal.betas)
        for g_idx, sigma2 in enumerate(config.sigma2)
        for m_idx, m in enumerate(config.m_grid)
    ]

    digest = config_digest(config)
    done = _load_partial(out, digest) if out else {}
    partial_lock = threading.Lock()
    partial_path = _prepare_partial(out, digest, done) if out else None

    def run_cell(cell):
        s_idx, strategy, b_idx, beta, g_idx, sigma2, m_idx, m = cell
        key = _cell_key(strategy, beta, sigma2, m)
        if key in done:
            return key, done[key]
        kappa = bandwidth_rule(m, beta, config.k_min, graph.n)
        try:
            mean, stderr = _cell_mse(
                config, graph, basis, pools[b_idx], strategy,
                s_idx, b_idx, g_idx, m_idx, sigma2, m, kappa,
            )
        except Exception:
            mean, stderr = float("nan"), float("nan")
        row = ResultRow(
            graph_kind=graph.kind, n=graph.n, strategy=strategy, beta=beta,
            sigma2=sigma2, m=m, kappa=kappa, mse_mean=mean, mse_stderr=stderr,
            trials=config.trials, seed=config.master_seed,
        )
        if partial_path is not None:
            line = json.dumps({"key": key, "row": asdict(row)})
            with partial_lock, open(partial_path, "a") as fh:
                fh.write(line + "\n")
                fh.flush()
        return key, row

    workers = _worker_count(len(cells))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(run_cell, cells))
    else:
        results = dict(run_cell(c) for c in cells)

    return [results[_cell_key(c[1], c[3], c[5], c[7])] for c in cells]


def _cell_key(strategy, beta, sigma2, m) -> str:
    return json.dumps([strategy, beta, sigma2, m])


def _cell_mse(config, graph, basis, pool, strategy,
              s_idx, b_idx, g_idx, m_idx, sigma2, m, kappa):
    scores = None
    if strategy != "optimal":
        scores = make_scores(strategy, basis=basis, kappa=kappa, graph=graph)
    errs = np.empty(config.trials)
    for t in range(config.trials):
        x = pool[t % len(pool)]
        if strategy == "optimal":
            scores = make_scores("optimal", basis=basis, kappa=kappa,
                                 x=x, sigma2=sigma2)
        draw = draw_samples(
            x, scores, m, sigma2,
            seed=mix_seed(config.master_seed, _TAG_INDEX, s_idx, b_idx, g_idx, m_idx, t),
            noise_seed=mix_seed(config.master_seed, _TAG_NOISE, b_idx, g_idx, m_idx, t),
        )
        est = sample_proj(basis, kappa, draw, scores)
        diff = est.values - x.values
        errs[t] = diff @ diff
    stderr = float(errs.std(ddof=1) / np.sqrt(config.trials)) if config.trials > 1 else 0.0
    return float(errs.mean()), stderr


def _partial_paths(out: Path):
    return out / "results.partial.jsonl", out / "results.partial.meta.json"


def _load_partial(out: Path, digest: str) -> dict:
    data_path, meta_path = _partial_paths(out)
    if not data_path.exists() or not meta_path.exists():
        return {}
    try:
        with open(meta_path) as fh:
            if json.load(fh).get("config_digest") != digest:
                return {}
    except (json.JSONDecodeError, TypeError):
        return {}
    done = {}
    with open(data_path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                done[doc["key"]] = ResultRow(**doc["row"])
            except (json.JSONDecodeError, TypeError, KeyError):
                break  # truncated tail from an interrupted write
    return done


def _prepare_partial(out: Path, digest: str, done: dict) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    data_path, meta_path = _partial_paths(out)
    with open(meta_path, "w") as fh:
        json.dump({"config_digest": digest}, fh)
    # rewrite from the validated cells so a truncated tail does not linger
    with open(data_path, "w") as fh:
        for key, row in done.items():
            fh.write(json.dumps({"key": key, "row": asdict(row)}) + "\n")
    return data_path


def emit_results(rows, out_dir, config: ExperimentConfig | None = None) -> dict:
    """Write results.csv, manifest.json, and the log-log chart; return the paths."""
    if not rows:
        raise ConfigError("rows", "nothing to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    csv_path = out / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for row in rows:
            writer.writerow([getattr(row, f) for f in CSV_FIELDS])

    manifest_path = out / "manifest.json"
    manifest = {
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(),
        "rows": len(rows),
        "config": asdict(config) if config is not None else None,
        "oracle_strategies": sorted(
            {r.strategy for r in rows if r.strategy == "optimal"}
        ),
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)

    svg_path = out / "mse_vs_m.svg"
    svg_path.write_text(render_mse_chart(rows))
    return {"csv": csv_path, "manifest": manifest_path, "svg": svg_path}


def parse_results(csv_path) -> list[ResultRow]:
    """Round-trip reader for results.csv."""
    rows = []
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ConfigError(str(csv_path), "unexpected CSV header")
        for rec in reader:
            rows.append(
                ResultRow(
                    graph_kind=rec["graph_kind"],
                    n=int(rec["n"]),
                    strategy=rec["strategy"],
                    beta=float(rec["beta"]),
                    sigma2=float(rec["sigma2"]),
                    m=int(rec["m"]),
                    kappa=int(rec["kappa"]),
                    mse_mean=float(rec["mse_mean"]),
                    mse_stderr=float(rec["mse_stderr"]),
                    trials=int(rec["trials"]),
                    seed=int(rec["seed"]),
                )
            )
    return rows


FIGURE_FAMILIES = {
    "fig7": ("ring", {"k": 4}),
    "fig8": ("er", {"p": 0.01}),
    "fig9": ("rgg", {"radius": 0.03}),
    "fig10": ("ws", {"k": 2, "rewire": 1e-4}),
    "fig11": ("ba", {"attach": 1}),
}


def figure_config(tag: str, scale: int, out_dir=None, trials: int = 200,
                  master_seed: int = 2023) -> ExperimentConfig:
    """Benchmark config for one of the five reference families at a given size.

    Family parameters stay at their reference values; only the sample-size
    grid scales with the graph (8 log-spaced points from n/10 to 2n).
    """
    if tag not in FIGURE_FAMILIES:
        raise ConfigError("tag", f"unknown figure tag {tag!r}")
    if scale < 256:
        raise ConfigError("scale", f"need scale >= 256, got {scale}")
    kind, params = FIGURE_FAMILIES[tag]
    grid = np.unique(np.rint(np.geomspace(scale / 10, 2 * scale, 8)).astype(int))
    return ExperimentConfig(
        graph=GraphSpec(kind=kind, n=scale, params=params, seed=1),
        signal=SignalSpec(bandwidth=10, betas=(0.5, 1.0), count=trials),
        sigma2=(1e-4, 2e-2),
        strategies=("uniform", "leverage", "sqrt_leverage", "degree"),
        m_grid=tuple(int(v) for v in grid),
        trials=trials,
        master_seed=master_seed,
        out_dir=str(out_dir) if out_dir is not None else None,
    )


def reproduce_figure(tag: str, scale: int, out_dir, trials: int = 200,
                     master_seed: int = 2023) -> dict:
    """Run the reference sweep for one family and persist results + chart."""
    config = figure_config(tag, scale, out_dir=out_dir, trials=trials,
                           master_seed=master_seed)
    rows = run_experiment(config, out_dir=out_dir)
    return emit_results(rows, out_dir, config=config)


def render_mse_chart(rows, panel_width: int = 360, panel_height: int = 300) -> str:
    """Self-contained SVG: one log-log panel per (beta, sigma2), one polyline
    per strategy."""
    panels = sorted({(r.beta, r.sigma2) for r in rows})
    cols = min(2, len(panels))
    grid_rows = (len(panels) + cols - 1) // cols
    margin = {"left": 62, "right": 16, "top": 34, "bottom": 42}
    width = cols * panel_width
    height = grid_rows * panel_height + 22
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]

    strategies = []
    for r in rows:
        if r.strategy not in strategies:
            strategies.append(r.strategy)
    legend_x = 8
    for s in strategies:
        color = STRATEGY_COLORS.get(s, "#555555")
        parts.append(
            f'<text x="{legend_x}" y="14" fill="{color}" font-weight="bold">{s}</text>'
        )
        legend_x += 9 * len(s) + 18

    for p_idx, (beta, sigma2) in enumerate(panels):
        px = (p_idx % cols) * panel_width
        py = (p_idx // cols) * panel_height + 22
        panel_rows = [
            r for r in rows
            if (r.beta, r.sigma2) == (beta, sigma2)
            and np.isfinite(r.mse_mean) and r.mse_mean > 0
        ]
        if not panel_rows:
            continue
        x0, x1 = px + margin["left"], px + panel_width - margin["right"]
        y0, y1 = py + margin["top"], py + panel_height - margin["bottom"]
        lx = [np.log10(r.m) for r in panel_rows]
        ly = [np.log10(r.mse_mean) for r in panel_rows]
        lx_min, lx_max = min(lx), max(lx)
        ly_min, ly_max = min(ly), max(ly)
        if lx_max == lx_min:
            lx_max += 1.0
        if ly_max == ly_min:
            ly_max += 1.0
        pad = 0.05 * (ly_max - ly_min)
        ly_min, ly_max = ly_min - pad, ly_max + pad

        def to_px(v):
            return x0 + (v - lx_min) / (lx_max - lx_min) * (x1 - x0)

        def to_py(v):
            return y1 - (v - ly_min) / (ly_max - ly_min) * (y1 - y0)

        parts.append(
            f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" '
            f'fill="none" stroke="#999"/>'
        )
        parts.append(
            f'<text x="{(x0 + x1) / 2:.1f}" y="{py + 16}" text-anchor="middle">'
            f"beta={beta:g}, sigma2={sigma2:g}</text>"
        )
        for decade in range(int(np.floor(lx_min)), int(np.ceil(lx_max)) + 1):
            if lx_min <= decade <= lx_max:
                gx = to_px(decade)
                parts.append(
                    f'<line x1="{gx:.1f}" y1="{y0}" x2="{gx:.1f}" y2="{y1}" '
                    f'stroke="#eee"/>'
                )
                parts.append(
                    f'<text x="{gx:.1f}" y="{y1 + 14}" text-anchor="middle">'
                    f"1e{decade}</text>"
                )
        for decade in range(int(np.floor(ly_min)), int(np.ceil(ly_max)) + 1):
            if ly_min <= decade <= ly_max:
                gy = to_py(decade)
                parts.append(
                    f'<line x1="{x0}" y1="{gy:.1f}" x2="{x1}" y2="{gy:.1f}" '
                    f'stroke="#eee"/>'
                )
                parts.append(
                    f'<text x="{x0 - 6}" y="{gy + 4:.1f}" text-anchor="end">'
                    f"1e{decade}</text>"
                )
        parts.append(
            f'<text x="{(x0 + x1) / 2:.1f}" y="{y1 + 30}" text-anchor="middle">'
            f"samples m</text>"
        )
        for s in strategies:
            series = sorted(
                (r for r in panel_rows if r.strategy == s), key=lambda r: r.m
            )
            if not series:
                continue
            pts = " ".join(
                f"{to_px(np.log10(r.m)):.2f},{to_py(np.log10(r.mse_mean)):.2f}"
                for r in series
            )
            color = STRATEGY_COLORS.get(s, "#555555")
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.6"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts)
