"""Config-driven sweeps over (n, seed) with per-cell metrics and trend reports.

Config grammar (one ``key = value`` per line, ``#`` starts a comment, lists
are comma separated)::

    base         = path | cycle | star | ... (any generator kind)
    base_seed    = int            # only for random_tree (default 0)
    base_max_degree = int         # optional, random_tree only
    n            = 256, 512, 1024 # ascending
    eps          = 0.5            # constant eps ...
    eps_exponent = 0.3            # ... or eps = n^-a (exactly one of the two)
    seeds        = 5
    root_seed    = 1
    metrics      = diameter, t_mix
    alpha        = 0.5            # expansion profile range (default 0.5)
    k            = auto | int     # blob size (auto = ceil(4/eps))

Seeding: the perturbation of cell ``(n, i)`` uses the 64-bit seed
``cell_seed(root, n, i)``, the first 64 bits of
``SeedSequence(root, spawn_key=(n, i))``; metric-internal randomness (DFS
restarts) uses ``SeedSequence(root, spawn_key=(n, i, crc32(metric)))``.
Changing one cell's inputs therefore never moves another cell's stream.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .blobs import blob_partition, check_partition
from .errors import CapabilityError, ConfigError, DomainError, ParameterError, ReportError
from .expansion import edge_isoperimetric_exact, expansion_profile, vertex_isoperimetric_exact
from .graph import BASE_KINDS, PerturbationParams, diameter, generate_base, key_of, perturb
from .longpath import default_k, long_path_blob_heuristic
from .subsets import bound_violations
from .walks import mixing_bounds, mixing_time_exact

METRICS = (
    "diameter",
    "t_mix",
    "fr_sum",
    "iota_exact",
    "c_exact",
    "profile",
    "longpath",
    "blob_check",
    "prop17_check",
)
PROP17_MAX_N = 16

# growth law each metric is fitted against
GROWTH = {
    "diameter": ("log n", lambda n: math.log2(n)),
    "t_mix": ("log^2 n", lambda n: math.log2(n) ** 2),
    "fr_sum": ("log^2 n", lambda n: math.log2(n) ** 2),
    "longpath": ("n", lambda n: float(n)),
    "iota_exact": ("1/log n", lambda n: 1 / math.log2(n)),
    "c_exact": ("1/log n", lambda n: 1 / math.log2(n)),
    "profile": ("1", lambda n: 1.0),
}


@dataclass(frozen=True)
class ExperimentConfig:
    base: str
    n_list: tuple[int, ...]
    metrics: tuple[str, ...]
    seeds: int = 1
    root_seed: int = 0
    eps: float | None = None
    eps_exponent: float | None = None
    alpha: float = 0.5
    k: int | None = None
    base_seed: int = 0
    base_max_degree: int | None = None

    def __post_init__(self):
        if self.base not in BASE_KINDS:
            raise ConfigError(f"unknown base {self.base!r}")
        if not self.n_list or list(self.n_list) != sorted(self.n_list):
            raise ConfigError("n list must be nonempty and sorted ascending")
        if self.seeds < 1:
            raise ConfigError("seeds must be >= 1")
        if not self.metrics:
            raise ConfigError("metrics must be nonempty")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown:
            raise ConfigError(f"unknown metric(s) {', '.join(unknown)}; known: {', '.join(METRICS)}")
        if (self.eps is None) == (self.eps_exponent is None):
            raise ConfigError("give exactly one of eps and eps_exponent")

    def params(self, seed: int) -> PerturbationParams:
        if self.eps_exponent is not None:
            return PerturbationParams(0.0, seed, self.eps_exponent)
        return PerturbationParams(self.eps, seed)

    def eps_at(self, n: int) -> float:
        return self.params(0).eps_for(n)

    def blob_k(self, n: int) -> int:
        return self.k if self.k is not None else default_k(self.eps_at(n))


_INT_KEYS = {"seeds", "root_seed", "base_seed", "base_max_degree"}
_FLOAT_KEYS = {"eps", "eps_exponent", "alpha"}


def parse_config(text: str) -> ExperimentConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    known = {"base", "n", "metrics", "k"} | _INT_KEYS | _FLOAT_KEYS
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(extra))}")
    for req in ("base", "n", "metrics"):
        if req not in raw:
            raise ConfigError(f"missing required key {req!r}")
    try:
        kw: dict = {
            "base": raw["base"],
            "n_list": tuple(int(x) for x in raw["n"].split(",")),
            "metrics": tuple(x.strip() for x in raw["metrics"].split(",") if x.strip()),
        }
        for key in _INT_KEYS & raw.keys():
            kw[key] = int(raw[key])
        for key in _FLOAT_KEYS & raw.keys():
            kw[key] = float(raw[key])
        if "k" in raw and raw["k"] != "auto":
            kw["k"] = int(raw["k"])
    except ValueError as exc:
        raise ConfigError(f"bad value: {exc}") from None
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def cell_seed(root: int, n: int, seed_index: int) -> int:
    state = np.random.SeedSequence(root, spawn_key=(n, seed_index)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def metric_seed(root: int, n: int, seed_index: int, metric: str) -> int:
    state = np.random.SeedSequence(root, spawn_key=(n, seed_index, key_of(metric))).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


# running ------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[dict]
    aggregates: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "config": asdict(self.config),
            "aggregates": self.aggregates,
            "ratios": self.ratios,
            "fits": self.fits,
            "rows": [{k: v for k, v in r.items() if k != "runtime"} for r in self.rows],
        }

    @classmethod
    def from_json(cls, d: dict) -> "ExperimentResult":
        cfg = dict(d["config"])
        cfg["n_list"] = tuple(cfg["n_list"])
        cfg["metrics"] = tuple(cfg["metrics"])
        return cls(ExperimentConfig(**cfg), d["rows"], d["aggregates"], d["ratios"], d["fits"])

    def values(self, metric: str, n: int) -> list[float]:
        return [r["value"] for r in self.rows if r["metric"] == metric and r["n"] == n and r["status"] == "ok"]


def _measure(metric, cfg, pg, n, seed_index):
    g = pg.merged
    if metric == "diameter":
        return diameter(g)
    if metric == "t_mix":
        return mixing_time_exact(g)
    if metric == "fr_sum":
        return mixing_bounds(g, exact=True).fr_sum
    if metric == "iota_exact":
        return float(vertex_isoperimetric_exact(g).value)
    if metric == "c_exact":
        return float(edge_isoperimetric_exact(g).value)
    if metric == "profile":
        return min(v for _, v in expansion_profile(g, cfg.alpha))
    if metric == "longpath":
        seed = metric_seed(cfg.root_seed, n, seed_index, metric)
        return long_path_blob_heuristic(pg, cfg.blob_k(n), seed=seed).length
    if metric == "blob_check":
        part = blob_partition(pg.base, cfg.blob_k(n))
        return len(check_partition(pg.base, part))
    if metric == "prop17_check":
        if n > PROP17_MAX_N:
            raise CapabilityError(f"prop17_check needs n <= {PROP17_MAX_N}")
        return len(bound_violations(g))
    raise ConfigError(f"unknown metric {metric!r}")


def _run_cell(cfg: ExperimentConfig, n: int, seed_index: int) -> list[dict]:
    seed = cell_seed(cfg.root_seed, n, seed_index)
    rows = []
    try:
        base = generate_base(cfg.base, n, cfg.base_seed, max_degree=cfg.base_max_degree)
        pg = perturb(base, cfg.params(seed))
    except (ParameterError, DomainError) as exc:
        return [
            {"n": n, "seed_index": seed_index, "seed": seed, "metric": m, "value": None,
             "status": "skipped", "reason": f"precondition: {exc}", "runtime": 0.0}
            for m in cfg.metrics
        ]
    for metric in cfg.metrics:
        t0 = time.perf_counter()
        row = {"n": n, "seed_index": seed_index, "seed": seed, "metric": metric}
        try:
            value = _measure(metric, cfg, pg, n, seed_index)
            row.update(value=float(value), status="ok", reason="")
        except CapabilityError as exc:
            row.update(value=None, status="skipped", reason=f"capability: {exc}")
        except (DomainError, ParameterError) as exc:
            row.update(value=None, status="skipped", reason=f"precondition: {exc}")
        row["runtime"] = time.perf_counter() - t0
        rows.append(row)
    return rows


def _cell_job(args):
    cfg, n, i = args
    return _run_cell(cfg, n, i)


def run_sweep(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run every ``(n, seed_index)`` cell and aggregate.

    Rows come back sorted by ``(n, seed_index, metric order)`` regardless of
    how cells were scheduled.
    """
    jobs = [(cfg, n, i) for n in cfg.n_list for i in range(cfg.seeds)]
    if threads > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as ex:
            chunks = list(ex.map(_cell_job, jobs))
    else:
        chunks = [_cell_job(j) for j in jobs]
    order = {m: i for i, m in enumerate(cfg.metrics)}
    rows = sorted((r for c in chunks for r in c), key=lambda r: (r["n"], r["seed_index"], order[r["metric"]]))
    res = ExperimentResult(cfg, rows)
    _aggregate(res)
    return res


def _aggregate(res: ExperimentResult) -> None:
    cfg = res.config
    for metric in cfg.metrics:
        med = {}
        for n in cfg.n_list:
            vals = res.values(metric, n)
            if vals:
                med[n] = statistics.median(vals)
        res.aggregates[metric] = {str(n): v for n, v in med.items()}
        ns = [n for n in cfg.n_list if n in med]
        res.ratios[metric] = {
            f"{a}->{b}": (med[b] / med[a] if med[a] else None) for a, b in zip(ns, ns[1:])
        }
        if metric in GROWTH and len(set(ns)) >= 2 and GROWTH[metric][0] != "1":
            label, f = GROWTH[metric]
            x = np.array([f(n) for n in ns])
            y = np.array([med[n] for n in ns])
            slope, intercept = np.polyfit(x, y, 1)
            res.fits[metric] = {"against": label, "slope": float(slope), "intercept": float(intercept)}


def write_results(res: ExperimentResult, out_dir) -> dict[str, Path]:
    """Write ``rows.csv`` and ``result.json`` (both byte-stable) plus ``timings.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = ["n", "seed_index", "seed", "metric", "value", "status", "reason"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in res.rows:
        w.writerow(["" if r[c] is None else (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in cols])
    paths = {"rows": out / "rows.csv", "result": out / "result.json", "timings": out / "timings.csv"}
    paths["rows"].write_text(buf.getvalue())
    paths["result"].write_text(json.dumps(res.to_json(), indent=2, sort_keys=True) + "\n")
    tb = io.StringIO()
    tw = csv.writer(tb, lineterminator="\n")
    tw.writerow(["n", "seed_index", "metric", "runtime_s"])
    for r in res.rows:
        tw.writerow([r["n"], r["seed_index"], r["metric"], f"{r.get('runtime', 0.0):.6f}"])
    paths["timings"].write_text(tb.getvalue())
    return paths


# reports ---------------------------------------------------------------------------

THEOREMS = {
    "T1_1": ("iota_exact", "iota(G*) >= delta / (Delta^3 log n)"),
    "T1_2": ("c_exact", "c(G*) >= delta / log(e n)"),
    "T1_3": ("profile", "|dS| >= delta |S| for connected S with K log n <= |S| <= alpha n"),
    "T1_4": ("diameter", "diam(G*) <= C log n"),
    "T1_5": ("t_mix", "T_mix(G*) <= M log^2 n"),
    "T1_6": ("longpath", "G* contains a path of length c n"),
    "P1_7": ("prop17_check", "|C(v, a, b)| <= binom(a+b-1, b)"),
}


def load_calibration(path=None) -> dict:
    if path is None:
        text = resources.files("perturbgraph").joinpath("calibration.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _normalized(theorem: str, res: ExperimentResult, n: int) -> float | None:
    """Per-n median of the quantity whose constant the theorem asserts."""
    metric = THEOREMS[theorem][0]
    vals = res.values(metric, n)
    if not vals:
        return None
    lg = math.log2(n)
    cfg = res.config
    if theorem == "T1_1":
        delta = generate_base(cfg.base, n, cfg.base_seed, max_degree=cfg.base_max_degree).max_degree
        return statistics.median(v * delta**3 * math.log(n) for v in vals)
    if theorem == "T1_2":
        return statistics.median(v * math.log(math.e * n) for v in vals)
    if theorem == "T1_3":
        return statistics.median(vals)
    if theorem == "T1_4":
        return statistics.median(vals) / lg
    if theorem == "T1_5":
        return statistics.median(vals) / lg**2
    if theorem == "T1_6":
        return statistics.median(vals) / n
    return float(sum(vals))


def _match(entry: dict, res: ExperimentResult, theorem: str) -> bool:
    cfg = res.config
    m = entry.get("match", {})
    if entry.get("theorem") != theorem:
        return False
    if "base" in m and m["base"] != cfg.base:
        return False
    if "eps" in m and (cfg.eps is None or abs(m["eps"] - cfg.eps) > 1e-12):
        return False
    if "n" in m and list(m["n"]) != list(cfg.n_list):
        return False
    if "seeds" in m and m["seeds"] != cfg.seeds:
        return False
    if "root_seed" in m and m["root_seed"] != cfg.root_seed:
        return False
    return True


def theorem_report(res: ExperimentResult, theorem: str, calibration: dict | None = None) -> dict:
    """Fitted constant, per-n trend and band verdict for one theorem.

    ``status`` is ``pass``, ``band violated``, ``trend broken`` or
    ``uncalibrated`` (no frozen band matches this config); only the first
    and the last count as success.
    """
    if theorem not in THEOREMS:
        raise ReportError(f"unknown theorem {theorem!r}; expected one of {', '.join(THEOREMS)}")
    metric, claim = THEOREMS[theorem]
    if metric not in res.config.metrics:
        raise ReportError(f"{theorem} needs metric {metric!r}; add it to the config's metrics list")
    if calibration is None:
        calibration = load_calibration()
    per_n = {n: _normalized(theorem, res, n) for n in res.config.n_list}
    per_n = {n: v for n, v in per_n.items() if v is not None}
    if not per_n:
        raise ReportError(f"{theorem}: every {metric!r} cell was skipped")
    flags = []
    if theorem == "P1_7":
        fitted = sum(per_n.values())
        status = "pass" if fitted == 0 else "band violated"
        return {"theorem": theorem, "claim": claim, "fitted": fitted, "trend": per_n, "flags": flags,
                "status": status, "passed": status == "pass"}
    lower_is_claim = theorem in ("T1_1", "T1_2", "T1_3", "T1_6")
    fitted = min(per_n.values()) if lower_is_claim else max(per_n.values())
    ns = sorted(per_n)
    trend = {f"{a}->{b}": (per_n[b] / per_n[a] if per_n[a] else None) for a, b in zip(ns, ns[1:])}
    if theorem == "T1_1" and res.config.base == "star":
        flags.append("known failure mode: unbounded max degree (star base keeps iota ~ 1/n)")
    entry = next((e for e in calibration.get("bands", []) if _match(e, res, theorem)), None)
    if entry is None:
        status = "uncalibrated"
    else:
        lo, hi = entry["band"]
        if not lo <= fitted <= hi:
            status = "band violated"
        elif "trend" in entry and any(
            r is None or not entry["trend"][0] <= r <= entry["trend"][1] for r in trend.values()
        ):
            status = "trend broken"
        else:
            status = "pass"
    return {
        "theorem": theorem,
        "claim": claim,
        "fitted": fitted,
        "per_n": {str(n): v for n, v in per_n.items()},
        "trend": trend,
        "flags": flags,
        "calibration": entry,
        "status": status,
        "passed": status in ("pass", "uncalibrated"),
    }
