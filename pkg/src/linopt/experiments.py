"""Config-driven experiment orchestration and CSV/JSON emission.

Every experiment kind resolves to a config dataclass, runs with per-trial
RNG streams (trial t uses stream_id = t), and writes its CSV outputs plus a
manifest to <out>/<config-hash>/.  Identical (config, seed) reruns produce
byte-identical CSVs regardless of thread count.
"""

import csv
import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backend
from ._parallel import default_threads, map_batches
from .compress import banded_compress, effective_bandwidth, gate_count_naive
from .gaussian import Subsystem, check_bounds, renyi2_eig
from .geometry import GeometrySpec, brickwall_geometry, geometry_from_json
from .moments import fourth_moment_tables, uut_abs_mean
from .sampler import CircuitError, RngStream, circuit_snapshots, sample_circuit
from .walk import (meeting_tail_exact, meeting_time, meeting_time_tail,
                   mixing_curve, mixing_time, verify_boson_rw_all)

__all__ = ["ConfigError", "ExperimentConfig", "RunRecord", "run", "KINDS"]

KINDS = ("entropy-sweep", "uut-heatmap", "walk-check", "mixing", "meeting",
         "decouple", "compress-sweep", "bounds-audit")

_SNAPSHOT_BATCH = 64


class ConfigError(ValueError):
    """Invalid experiment configuration; message carries the field path."""


@dataclass
class ExperimentConfig:
    kind: str
    seed: int = 0
    trials: int = 1
    n: int = None
    depths: list = None
    s: float = 1.0
    k: int = None
    gamma: list = None
    geometry: dict = None
    epsilon: float = None
    t_max: int = None
    kappa: float = 2.0
    c_bands: list = field(default_factory=lambda: [2.0])
    n_seeds: int = 100
    samples: int = 10000
    d_max: int = 32
    s_max: float = 2.0
    per_trial: bool = False
    probe_steps: list = None
    method: str = "exact"
    depth_override: int = None

    def resolved_geometry(self) -> GeometrySpec:
        if self.geometry is not None:
            return geometry_from_json(self.geometry)
        if self.n is None:
            raise ConfigError("geometry: need either geometry or n")
        return brickwall_geometry(self.n)

    def subsystem(self) -> Subsystem:
        if self.gamma is not None:
            return Subsystem(tuple(self.gamma))
        if self.k is not None:
            return Subsystem.first_k(self.k)
        raise ConfigError("gamma: need either k or gamma")

    def to_json(self) -> dict:
        out = {}
        for name in ("kind", "seed", "trials", "n", "depths", "s", "k", "gamma",
                     "geometry", "epsilon", "t_max", "kappa", "c_bands",
                     "n_seeds", "samples", "d_max", "s_max", "per_trial",
                     "probe_steps", "method", "depth_override"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


def _field(cfg: dict, name: str, kind, required=False, default=None):
    if name not in cfg or cfg[name] is None:
        if required:
            raise ConfigError(f"{name}: required for kind {cfg.get('kind')!r}")
        return default
    value = cfg[name]
    try:
        if kind is int and isinstance(value, bool):
            raise TypeError
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected {kind.__name__}, got {value!r}")


def parse_config(cfg: dict) -> ExperimentConfig:
    if not isinstance(cfg, dict):
        raise ConfigError(": config must be a JSON object")
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind: must be one of {KINDS}, got {kind!r}")
    out = ExperimentConfig(
        kind=kind,
        seed=_field(cfg, "seed", int, default=0),
        trials=_field(cfg, "trials", int, default=1),
        n=_field(cfg, "n", int),
        s=_field(cfg, "s", float, default=1.0),
        k=_field(cfg, "k", int),
        epsilon=_field(cfg, "epsilon", float),
        t_max=_field(cfg, "t_max", int),
        kappa=_field(cfg, "kappa", float, default=2.0),
        n_seeds=_field(cfg, "n_seeds", int, default=100),
        samples=_field(cfg, "samples", int, default=10000),
        d_max=_field(cfg, "d_max", int, default=32),
        s_max=_field(cfg, "s_max", float, default=2.0),
        per_trial=bool(cfg.get("per_trial", False)),
        method=str(cfg.get("method", "exact")),
        depth_override=_field(cfg, "depth", int),
    )
    out.depths = [int(d) for d in cfg["depths"]] if cfg.get("depths") else None
    out.gamma = [int(g) for g in cfg["gamma"]] if cfg.get("gamma") else None
    out.geometry = cfg.get("geometry")
    out.c_bands = [float(c) for c in cfg.get("c_bands", [2.0])]
    out.probe_steps = ([int(t) for t in cfg["probe_steps"]]
                       if cfg.get("probe_steps") else None)
    _validate(out)
    return out


def _validate(c: ExperimentConfig):
    if c.trials < 1:
        raise ConfigError(f"trials: must be >= 1, got {c.trials}")
    if c.seed < 0:
        raise ConfigError(f"seed: must be >= 0, got {c.seed}")
    if c.depths is not None:
        if not c.depths or any(b <= a for a, b in zip(c.depths, c.depths[1:])):
            raise ConfigError(f"depths: must be nonempty strictly increasing, got {c.depths}")
        if c.depths[0] < 0:
            raise ConfigError(f"depths: must be >= 0, got {c.depths}")
    if c.kind == "entropy-sweep":
        if c.depths is None:
            raise ConfigError("depths: required for entropy-sweep")
        c.subsystem()
    if c.kind in ("uut-heatmap", "walk-check") and c.depth_override is None:
        raise ConfigError("depth: required for this kind")
    if c.kind == "mixing":
        if c.epsilon is None or not 0.0 < c.epsilon < 1.0:
            raise ConfigError(f"epsilon: must be in (0,1), got {c.epsilon}")
        if c.t_max is None or c.t_max < 1:
            raise ConfigError(f"t_max: must be >= 1, got {c.t_max}")
    if c.kind == "meeting":
        if c.t_max is None or c.t_max < 1:
            raise ConfigError(f"t_max: must be >= 1, got {c.t_max}")
        if c.method not in ("exact", "mc"):
            raise ConfigError(f"method: must be exact or mc, got {c.method!r}")
    if c.kind == "compress-sweep":
        if c.n is None or c.depth_override is None:
            raise ConfigError("n, depth: required for compress-sweep")
        if not c.c_bands:
            raise ConfigError("c_bands: must be nonempty")
    if c.kind in ("entropy-sweep", "uut-heatmap", "walk-check", "decouple"):
        if c.n is None and c.geometry is None:
            raise ConfigError("n: required (or an explicit geometry)")


@dataclass
class RunRecord:
    config_hash: str
    out_dir: Path
    manifest_path: Path
    aggregates: dict
    wall_time_s: float
    outputs: dict


def _config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(cfg.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _build_info() -> dict:
    try:
        from importlib.metadata import version
        pkg = version("linopt")
    except Exception:
        pkg = "unknown"
    return {"package": f"linopt {pkg}", "backend": backend.active_backend(),
            "numpy": np.__version__}


# -- per-kind runners ---------------------------------------------------------

def _check_final_defects(u_batch: np.ndarray, trial_base: int):
    eye = np.eye(u_batch.shape[1])
    for i, u in enumerate(u_batch):
        defect = np.linalg.norm(u.conj().T @ u - eye)
        if defect > 1e-8:
            raise CircuitError(
                f"trial {trial_base + i}: unitarity defect {defect:.3e} > 1e-8")


def _run_entropy_sweep(c: ExperimentConfig, threads: int):
    geom = c.resolved_geometry()
    gamma = c.subsystem()
    s = c.s
    depths = c.depths

    def worker(start, count):
        streams = [RngStream(c.seed, start + i) for i in range(count)]
        vals = np.empty((len(depths), count))
        row = 0
        for depth, u in circuit_snapshots(geom, depths, streams):
            for i in range(count):
                vals[row, i] = renyi2_eig(u[i], gamma, s).value
            if depth == depths[-1]:
                _check_final_defects(u, start)
            row += 1
        return vals

    parts = map_batches(c.trials, _SNAPSHOT_BATCH, threads, worker)
    vals = np.concatenate(parts, axis=1)
    agg_rows = []
    for i, depth in enumerate(depths):
        v = vals[i]
        mean = float(v.mean())
        var = float(v.var(ddof=1)) if c.trials > 1 else 0.0
        stderr = math.sqrt(var / c.trials) if c.trials > 1 else 0.0
        agg_rows.append((depth, mean, var, stderr, c.trials))
    files = {"aggregate.csv": (("depth", "mean_s2", "var_s2", "stderr_s2", "trials"),
                               agg_rows)}
    if c.per_trial:
        per_rows = [(depths[i], t, float(vals[i, t]))
                    for i in range(len(depths)) for t in range(c.trials)]
        files["per_trial.csv"] = (("depth", "trial", "s2"), per_rows)
        for i in range(len(depths)):
            sel = np.array([r[2] for r in per_rows[i * c.trials:(i + 1) * c.trials]])
            if not np.allclose(sel.mean(), agg_rows[i][1], rtol=0, atol=1e-12):
                raise RuntimeError("aggregate/per-trial consistency check failed")
    agg = {"depths": depths, "mean_s2": [r[1] for r in agg_rows],
           "var_s2": [r[2] for r in agg_rows]}
    return files, agg


def _run_uut_heatmap(c: ExperimentConfig, threads: int):
    geom = c.resolved_geometry()
    mean, _ = uut_abs_mean(geom, c.depth_override, c.trials, RngStream(c.seed),
                           threads=threads)
    rows = [(x + 1, y + 1, float(mean[x, y]))
            for x in range(geom.n) for y in range(geom.n)]
    files = {"heatmap.csv": (("x", "y", "value"), rows)}
    return files, {"n": geom.n, "depth": c.depth_override, "trials": c.trials}


def _run_walk_check(c: ExperimentConfig, threads: int):
    geom = c.resolved_geometry()
    report = verify_boson_rw_all(geom, c.depth_override, c.trials, RngStream(c.seed))
    rows = [(x + 1, y + 1, float(report.mc[x, y]), float(report.exact[x, y]),
             float(report.stderr[x, y]), float(report.z[x, y]))
            for x in range(geom.n) for y in range(geom.n)]
    files = {"walkcheck.csv": (("x", "y", "mc", "exact", "stderr", "z"), rows)}
    return files, {"max_abs_z": report.max_abs_z, "depth": c.depth_override,
                   "trials": c.trials}


def _run_mixing(c: ExperimentConfig, threads: int):
    geom = c.resolved_geometry()
    rows = []
    t_mix = None
    for t, max_tv in mixing_curve(geom, c.t_max):
        rows.append((t, max_tv))
        if t_mix is None and max_tv <= c.epsilon:
            t_mix = t
            break
    files = {"mixing.csv": (("t", "max_tv"), rows)}
    return files, {"t_mix": t_mix if t_mix is not None else "not reached",
                   "epsilon": c.epsilon}


def _run_meeting(c: ExperimentConfig, threads: int):
    geom = c.resolved_geometry()
    m = geom.n_layers
    epsilon = c.epsilon if c.epsilon is not None else 1.0 / geom.n**3
    probes = c.probe_steps
    if probes is None:
        probes = sorted({1 << i for i in range(0, c.t_max.bit_length())
                         if (1 << i) <= c.t_max} | {c.t_max})
    rows = []
    if c.method == "exact":
        t_meet = meeting_time(geom, epsilon, c.t_max)
        for t in probes:
            tails = meeting_tail_exact(geom, t)
            for x in range(1, geom.n + 1):
                for y in range(x, geom.n + 1):
                    rows.append((t * m, x, y, float(tails[x - 1, y - 1]), 0.0))
    else:
        t_meet = None
        for t in probes:
            est = meeting_time_tail(geom, t, c.trials, RngStream(c.seed))
            for (x, y), tail, se in zip(est.starts, est.tails, est.stderr):
                rows.append((int(round(t * m)), int(x), int(y), float(tail), float(se)))
    files = {"meeting.csv": (("t_times_M", "start_x", "start_y",
                              "tail_estimate", "stderr"), rows)}
    return files, {"t_meet": t_meet if t_meet is not None else "not reached",
                   "epsilon": epsilon, "method": c.method}


def _run_decouple(c: ExperimentConfig, threads: int):
    geom = c.resolved_geometry()
    n = geom.n
    eps_mix = 1.0 / n**2
    eps_meet = 1.0 / n**3
    t_mix = mixing_time(geom, eps_mix, t_max=64 * n * n)
    t_meet = meeting_time(geom, eps_meet, t_max=64 * n * n)
    if t_mix is None or t_meet is None:
        raise ConfigError("decouple: walk did not mix/meet within 64 n^2 steps")
    depth = c.depth_override if c.depth_override is not None else math.ceil(t_mix + t_meet)
    row_mean, row_se, col_mean, col_se = fourth_moment_tables(
        geom, depth, c.trials, RngStream(c.seed), threads=threads)
    threshold = 0.9 / (3.0 * n * n)
    rows = []
    ok = True
    for variant, mean, se in (("rows", row_mean, row_se), ("cols", col_mean, col_se)):
        fail = mean < threshold - 3.0 * se
        ok &= not bool(fail.any())
        for a in range(n):
            for x in range(n):
                for y in range(n):
                    rows.append((variant, a + 1, x + 1, y + 1,
                                 float(mean[a, x, y]), float(se[a, x, y])))
    files = {"decouple.csv": (("variant", "alpha", "x", "y", "value", "stderr"), rows)}
    agg = {"depth": depth, "t_mix": t_mix, "t_meet": t_meet,
           "threshold": threshold,
           "min_rows": float(row_mean.min()), "min_cols": float(col_mean.min()),
           "pass": bool(ok)}
    return files, agg


def _run_compress_sweep(c: ExperimentConfig, threads: int):
    geom = brickwall_geometry(c.n)
    depth = c.depth_override
    naive = gate_count_naive(geom, depth)
    rows = []
    best = None
    for c_band in c.c_bands:
        w = effective_bandwidth(depth, c.kappa, c_band, n=c.n)
        errors = []
        counts = []
        for s_i in range(c.n_seeds):
            cs = sample_circuit(geom, depth, RngStream(c.seed, s_i))
            res = banded_compress(cs.u, w)
            errors.append(res.hs_error)
            counts.append(res.gate_count)
            rows.append((s_i, c_band, w, res.hs_error, res.gate_count,
                         res.phase_count, naive.two_mode, res.eps_hat,
                         int(res.close_diag_ok())))
        frac_ok = float(np.mean(np.asarray(errors) <= 0.1))
        if best is None or frac_ok > best[1]:
            best = (c_band, frac_ok, w, float(np.median(errors)), max(counts))
    files = {"compress.csv": (("seed", "c_band", "w", "hs_error", "gate_count",
                               "phase_count", "naive_two_mode", "eps_hat",
                               "close_diag_ok"), rows)}
    agg = {"best_c_band": best[0], "frac_hs_error_le_0.1": best[1],
           "w_at_best": best[2], "hs_error_median": best[3],
           "gate_count": best[4], "naive_two_mode": naive.two_mode}
    return files, agg


def _run_bounds_audit(c: ExperimentConfig, threads: int):
    param_gen = RngStream(c.seed, 2**48).generator()
    rows = []
    violations = 0
    n_max = c.n if c.n is not None else 64
    for case in range(c.samples):
        n = 2 * int(param_gen.integers(1, n_max // 2 + 1))
        d = int(param_gen.integers(0, c.d_max + 1))
        s = float(param_gen.uniform(0.05, c.s_max))
        k = int(param_gen.integers(1, max(n // 2, 1) + 1))
        cs = sample_circuit(brickwall_geometry(n), d, RngStream(c.seed, case))
        report = check_bounds(cs, Subsystem.first_k(k), s)
        ok_w = report.passes.get("worst_case", True)
        ok_t = report.passes["trivial"]
        ok_b = report.passes["boundary"]
        violations += int(not (ok_w and ok_t and ok_b))
        rows.append((case, n, d, s, k, report.s2, report.worst_case_bound,
                     report.trivial_bound, report.boundary_bound,
                     int(ok_w), int(ok_t), int(ok_b)))
    files = {"bounds.csv": (("case", "n", "d", "s", "k", "s2", "worst_bound",
                             "trivial_bound", "boundary_bound", "ok_worst",
                             "ok_trivial", "ok_boundary"), rows)}
    return files, {"samples": c.samples, "violations": violations}


_RUNNERS = {
    "entropy-sweep": _run_entropy_sweep,
    "uut-heatmap": _run_uut_heatmap,
    "walk-check": _run_walk_check,
    "mixing": _run_mixing,
    "meeting": _run_meeting,
    "decouple": _run_decouple,
    "compress-sweep": _run_compress_sweep,
    "bounds-audit": _run_bounds_audit,
}


def run(config, out_root="runs", threads=None) -> RunRecord:
    """Execute an experiment and write CSV outputs plus manifest.json.

    config may be an ExperimentConfig or a raw dict (JSON form).
    """
    if isinstance(config, dict):
        config = parse_config(config)
    threads = default_threads(threads)
    t0 = time.monotonic()
    files, aggregates = _RUNNERS[config.kind](config, threads)
    wall = time.monotonic() - t0

    chash = _config_hash(config)
    out_dir = Path(out_root) / chash
    out_dir.mkdir(parents=True, exist_ok=True)
    hashes = {}
    for name, (header, rows) in files.items():
        path = out_dir / name
        _write_csv(path, header, rows)
        hashes[name] = hashlib.sha256(path.read_bytes()).hexdigest()
    manifest = {
        "kind": config.kind,
        "config": config.to_json(),
        "config_hash": chash,
        "build": _build_info(),
        "outputs": hashes,
        "aggregates": aggregates,
        "wall_time_s": wall,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return RunRecord(config_hash=chash, out_dir=out_dir,
                     manifest_path=manifest_path, aggregates=aggregates,
                     wall_time_s=wall, outputs=hashes)
