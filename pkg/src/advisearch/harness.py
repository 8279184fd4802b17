"""Experiment configuration, execution and reporting.

Random streams
--------------
Trial ``t`` of a run with seed ``s`` draws from
``numpy.random.Generator(PCG64(SeedSequence(s, spawn_key=(t,))))``.  The
stream depends only on ``(s, t)``, so results do not depend on how trials
are spread over worker threads; aggregation always happens in trial order.

Report formats
--------------
JSON: ``{"schema", "mode", "engine", "config", "results", "checks",
"ledger", "notes", "wall_time_s"}`` with keys in that order.  ``checks`` is a
list of ``{"name", "value", "bound", "relation", "tolerance", "passed"}``.

CSV (run reports): header :data:`REPORT_CSV_HEADER`; one row per result and
one per check.  CSV (sweeps): header :data:`SWEEP_CSV_HEADER`, one row per N.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Optional, Sequence

import numpy as np

from .advice import (
    AdviceDistribution,
    classical_average_complexity,
    corollary_constants,
    corollary_noise_level,
    lemma1_bound,
    power_law_advice,
    theorem2_bounds,
    uniform_advice,
)
from .errors import ConfigError, InvalidArgument
from .geometric import AdviceOrdering, QueryLedger, exact_expected_queries, run_geometric_search
from .grover import ENGINES, RoundSchedule, resolve_engine
from .quantum import Dephasing, Depolarizing, NoiseModel, OracleSpec

SCHEMA = "advisearch-report/1"
SWEEP_SCHEMA = "advisearch-sweep/1"
REPORT_CSV_HEADER = "kind,name,value,bound,relation,tolerance,passed"
SWEEP_CSV_HEADER = "N,delta,p,D_mu,T,T_stderr,T_kind,lemma1_bound,theorem2_upper,c3_lnN,c4_bound"
MODES = ("monte_carlo", "exact", "bounds", "sweep")
CHANNELS = {"depolarizing": Depolarizing, "dephasing": Dephasing}
ADVICE_KINDS = ("power_law", "uniform")
ABSENT_BLOCK_NOTE = (
    "quantum blocks not containing the marked element cost sum_{i<max_rounds}(M_i+1) "
    "queries; bound checks cover this capped-round variant with the fallback sweep included"
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment's output.

    ``delta=None`` means ``1/N``.  ``p`` and ``corollary_q`` are mutually
    exclusive; with neither the run is noiseless.  ``threads`` only affects
    speed and is not echoed into reports.
    """

    N: int = 512
    delta: Optional[float] = None
    advice: str = "power_law"
    p: Optional[float] = None
    corollary_q: Optional[float] = None
    channel: str = "depolarizing"
    epsilon: float = 0.5
    c: float = 10.0
    max_rounds: int = 200
    engine: str = "auto"
    trials: int = 1000
    seed: int = 0
    mode: str = "monte_carlo"
    grid: tuple[int, ...] = ()
    sweep_trials: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError("N", f"must be >= 1, got {self.N}")
        if self.delta is not None and not 0.0 < self.delta <= 0.25:
            raise ConfigError("delta", f"must lie in (0, 1/4], got {self.delta}")
        if self.advice not in ADVICE_KINDS:
            raise ConfigError("advice", f"must be one of {ADVICE_KINDS}")
        if self.p is not None and self.corollary_q is not None:
            raise ConfigError("p", "give either p or corollary_q, not both")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ConfigError("p", f"must lie in [0, 1], got {self.p}")
        if self.corollary_q is not None and not 0.0 < self.corollary_q <= 1.0:
            raise ConfigError("corollary_q", f"must lie in (0, 1], got {self.corollary_q}")
        if self.channel not in CHANNELS:
            raise ConfigError("channel", f"must be one of {tuple(CHANNELS)}")
        if not 0.0 < self.epsilon <= 0.5:
            raise ConfigError("epsilon", f"must lie in (0, 0.5], got {self.epsilon}")
        if not self.c > 0:
            raise ConfigError("c", f"must be positive, got {self.c}")
        if self.max_rounds < 1:
            raise ConfigError("max_rounds", f"must be >= 1, got {self.max_rounds}")
        if self.engine not in ENGINES:
            raise ConfigError("engine", f"must be one of {ENGINES}")
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}")
        if self.mode == "monte_carlo" and self.trials < 1:
            raise ConfigError("trials", "must be >= 1 for Monte Carlo runs")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        if self.mode == "sweep" and not self.grid:
            raise ConfigError("grid", "sweep needs a nonempty N grid")
        if any(n < 1 for n in self.grid):
            raise ConfigError("grid", "grid entries must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads", "must be >= 1")

    # -- derived objects ---------------------------------------------------

    def delta_for(self, N: int) -> float:
        return 1.0 / N if self.delta is None else self.delta

    def p_for(self, N: int) -> float:
        if self.corollary_q is not None:
            return corollary_noise_level(max(N, 2), self.corollary_q)
        return 0.0 if self.p is None else self.p

    def noise_for(self, N: int) -> NoiseModel:
        return NoiseModel(self.p_for(N), CHANNELS[self.channel]())

    def advice_for(self, N: int) -> AdviceDistribution:
        if self.advice == "uniform":
            return uniform_advice(N)
        delta = self.delta_for(N)
        if not 0.0 < delta <= 0.25:
            raise ConfigError("delta", f"1/N = {delta} outside (0, 1/4]; set delta explicitly")
        return power_law_advice(N, delta)

    @property
    def schedule(self) -> RoundSchedule:
        return RoundSchedule(self.epsilon, self.c, self.max_rounds)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("threads")
        d["grid"] = list(self.grid)
        return d


@dataclass
class Check:
    name: str
    value: float
    bound: float
    relation: str  # "<=", ">=" or "|diff|<="
    tolerance: float = 0.0
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.relation == "<=":
            self.passed = bool(self.value <= self.bound + self.tolerance)
        elif self.relation == ">=":
            self.passed = bool(self.value >= self.bound - self.tolerance)
        elif self.relation == "|diff|<=":
            self.passed = bool(abs(self.value) <= self.bound)
        else:
            raise ValueError(f"unknown relation {self.relation!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "bound": self.bound,
            "relation": self.relation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class RunReport:
    mode: str
    engine: str
    config: dict
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    ledger: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def add_check(self, *args, **kwargs) -> None:
        self.checks.append(Check(*args, **kwargs).to_dict())

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "schema": SCHEMA,
            "mode": self.mode,
            "engine": self.engine,
            "config": self.config,
            "results": self.results,
            "checks": self.checks,
            "ledger": self.ledger,
            "notes": self.notes,
        }
        if self.rows:
            d["rows"] = self.rows
        if timing:
            d["wall_time_s"] = self.wall_time_s
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(
            mode=d["mode"],
            engine=d["engine"],
            config=d["config"],
            results=d.get("results", {}),
            checks=d.get("checks", []),
            ledger=d.get("ledger", {}),
            notes=d.get("notes", []),
            rows=d.get("rows", []),
            wall_time_s=d.get("wall_time_s", 0.0),
        )


# -- runners -----------------------------------------------------------------


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def _engine_name(config: ExperimentConfig, N: int) -> str:
    return resolve_engine(config.engine, config.noise_for(N))


@dataclass(frozen=True)
class _TrialResult:
    marked: int
    element: int
    ledger: QueryLedger
    used_fallback: bool


def _monte_carlo_trials(config: ExperimentConfig, N: int, trials: int) -> list[_TrialResult]:
    mu = config.advice_for(N)
    cdf = np.cumsum(mu.weights)
    ordering = AdviceOrdering.identity(N)
    noise = config.noise_for(N)
    schedule = config.schedule

    def one(t: int) -> _TrialResult:
        rng = trial_rng(config.seed, t)
        rank = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")) + 1, N)
        marked = ordering.element(rank)
        oracle = OracleSpec(N, marked)
        res = run_geometric_search(oracle, ordering, noise, schedule, rng, config.engine)
        return _TrialResult(marked, res.element, res.ledger, res.used_fallback)

    if config.threads == 1:
        return [one(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(one, range(trials)))


def _summarise(results: Sequence[_TrialResult]) -> tuple[float, float, dict, int, int]:
    totals = np.array([r.ledger.total for r in results], dtype=float)
    n = totals.size
    mean = math.fsum(totals.tolist()) / n
    stderr = float(np.std(totals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    ledger = {
        name: int(sum(getattr(r.ledger, name) for r in results))
        for name in ("classical_queries", "quantum_queries", "verification_queries", "fallback_queries")
    }
    ledger["total"] = int(sum(ledger.values()))
    failures = sum(r.element != r.marked for r in results)
    fallbacks = sum(r.used_fallback for r in results)
    return mean, stderr, ledger, failures, fallbacks


def run_monte_carlo(config: ExperimentConfig) -> RunReport:
    """Estimate the average-case query count by simulating ``trials`` searches."""
    if config.mode != "monte_carlo":
        config = replace(config, mode="monte_carlo")
    t0 = time.perf_counter()
    N = config.N
    engine = _engine_name(config, N)
    results = _monte_carlo_trials(config, N, config.trials)
    mean, stderr, ledger, failures, fallbacks = _summarise(results)
    report = RunReport("monte_carlo", engine, config.echo(), ledger=ledger, notes=[ABSENT_BLOCK_NOTE])
    report.results.update(
        {
            "N": N,
            "delta": config.delta_for(N),
            "p": config.p_for(N),
            "trials": config.trials,
            "T_measured_mean": mean,
            "T_measured_stderr": stderr,
            "fallback_runs": fallbacks,
            "invalid_results": failures,
        }
    )
    report.add_check("validity_invalid_results", float(failures), 0.0, "<=")
    if engine == "reduced":
        mu = config.advice_for(N)
        exact = exact_expected_queries(N, mu, config.noise_for(N), config.schedule, engine)
        report.results["T_exact"] = exact
        report.add_check("mc_vs_exact_3sigma", mean - exact, 3.0 * stderr, "|diff|<=")
    report.wall_time_s = time.perf_counter() - t0
    return report


def _bound_values(config: ExperimentConfig, N: int, mu: AdviceDistribution) -> dict:
    p = config.p_for(N)
    out: dict[str, Any] = {"D_mu": classical_average_complexity(mu)}
    out["lemma1_bound"] = lemma1_bound(mu, p, config.epsilon)
    delta = mu.delta
    if delta is not None and N >= 100:
        lower, upper = theorem2_bounds(N, delta, p)
        out["theorem2_classical_lower"] = lower
        out["theorem2_quantum_upper"] = upper
    c3, c4 = corollary_constants()
    out["c3"] = c3
    out["c4"] = c4
    if N >= 2:
        out["c3_lnN"] = c3 * math.log(N)
        q = 1.0 if config.corollary_q is None else config.corollary_q
        out["c4_bound"] = c4 * math.log(N) ** (1.0 - q)
    out["delta_regime"] = mu.regime
    return out


def _add_bound_checks(report: RunReport, config: ExperimentConfig, N: int, mu, values: dict, T=None) -> None:
    if "theorem2_classical_lower" in values:
        report.add_check("theorem2_D_lower", values["D_mu"], values["theorem2_classical_lower"], ">=")
    if mu.regime == "corollary" and N >= 100:
        report.add_check("corollary_D_lower", values["D_mu"], values["c3_lnN"], ">=")
    if T is None:
        return
    report.add_check("lemma1_T_upper", T, values["lemma1_bound"], "<=")
    if "theorem2_quantum_upper" in values:
        report.add_check("theorem2_T_upper", T, values["theorem2_quantum_upper"], "<=")
    if mu.regime == "corollary" and N >= 100 and config.corollary_q is not None:
        report.add_check("corollary_T_upper", T, values["c4_bound"], "<=")


def run_exact(config: ExperimentConfig) -> RunReport:
    """Exact expected query count alongside every applicable bound."""
    t0 = time.perf_counter()
    N = config.N
    noise = config.noise_for(N)
    engine = resolve_engine(config.engine, noise)
    mu = config.advice_for(N)
    T = exact_expected_queries(N, mu, noise, config.schedule, engine)
    report = RunReport("exact", engine, config.echo(), notes=[ABSENT_BLOCK_NOTE])
    values = _bound_values(config, N, mu)
    report.results.update({"N": N, "delta": config.delta_for(N), "p": config.p_for(N), "T_exact": T, **values})
    _add_bound_checks(report, config, N, mu, values, T)
    report.wall_time_s = time.perf_counter() - t0
    return report


def run_bounds(config: ExperimentConfig) -> RunReport:
    t0 = time.perf_counter()
    N = config.N
    mu = config.advice_for(N)
    values = _bound_values(config, N, mu)
    report = RunReport("bounds", "none", config.echo())
    report.results.update({"N": N, "delta": config.delta_for(N), "p": config.p_for(N), **values})
    _add_bound_checks(report, config, N, mu, values)
    report.wall_time_s = time.perf_counter() - t0
    return report


def _sweep_row(config: ExperimentConfig, N: int) -> tuple[dict, list]:
    mu = config.advice_for(N)
    noise = config.noise_for(N)
    values = _bound_values(config, N, mu)
    if config.sweep_trials > 0:
        results = _monte_carlo_trials(replace(config, threads=1), N, config.sweep_trials)
        T, stderr, _, failures, _ = _summarise(results)
        kind = "monte_carlo"
    else:
        T = exact_expected_queries(N, mu, noise, config.schedule, config.engine)
        stderr, failures, kind = 0.0, 0, "exact"
    row = {
        "N": N,
        "delta": config.delta_for(N),
        "p": config.p_for(N),
        "D_mu": values["D_mu"],
        "T": T,
        "T_stderr": stderr,
        "T_kind": kind,
        "lemma1_bound": values["lemma1_bound"],
        "theorem2_upper": values.get("theorem2_quantum_upper", float("nan")),
        "c3_lnN": values.get("c3_lnN", float("nan")),
        "c4_bound": values.get("c4_bound", float("nan")),
    }
    sub = RunReport("sweep", "", {})
    _add_bound_checks(sub, config, N, mu, values, T)
    for chk in sub.checks:
        chk["name"] = f"N={N}:{chk['name']}"
    if kind == "monte_carlo":
        sub.add_check(f"N={N}:validity_invalid_results", float(failures), 0.0, "<=")
    return row, sub.checks


def run_sweep(config: ExperimentConfig) -> RunReport:
    """One row per grid point, ordered by N; rows run concurrently with ``threads``."""
    t0 = time.perf_counter()
    grid = sorted(config.grid)
    if not grid:
        raise ConfigError("grid", "sweep needs a nonempty N grid")
    if config.threads == 1:
        out = [_sweep_row(config, N) for N in grid]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            out = list(pool.map(lambda N: _sweep_row(config, N), grid))
    report = RunReport("sweep", _engine_name(config, grid[0]), config.echo(), notes=[ABSENT_BLOCK_NOTE])
    report.rows = [row for row, _ in out]
    report.checks = [chk for _, checks in out for chk in checks]
    Ts = [row["T"] for row in report.rows]
    imax = int(np.argmax(Ts))
    report.results.update({"T_max": Ts[imax], "T_max_at_N": report.rows[imax]["N"], "rows": len(report.rows)})
    report.wall_time_s = time.perf_counter() - t0
    return report


def run(config: ExperimentConfig) -> RunReport:
    return {
        "monte_carlo": run_monte_carlo,
        "exact": run_exact,
        "bounds": run_bounds,
        "sweep": run_sweep,
    }[config.mode](config)


# -- output ------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def report_json(report: RunReport, timing: bool = True) -> str:
    return json.dumps(report.to_dict(timing), indent=2) + "\n"


def report_csv(report: RunReport) -> str:
    buf = io.StringIO()
    if report.mode == "sweep":
        cols = SWEEP_CSV_HEADER.split(",")
        buf.write(SWEEP_CSV_HEADER + "\n")
        w = csv.writer(buf, lineterminator="\n")
        for row in report.rows:
            w.writerow([_fmt(row[c]) for c in cols])
        return buf.getvalue()
    buf.write(REPORT_CSV_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for name, value in report.results.items():
        w.writerow(["result", name, _fmt(value), "", "", "", ""])
    for chk in report.checks:
        w.writerow(
            ["check", chk["name"], _fmt(chk["value"]), _fmt(chk["bound"]), chk["relation"],
             _fmt(chk["tolerance"]), _fmt(chk["passed"])]
        )
    return buf.getvalue()


def report_text(report: RunReport) -> str:
    lines = [f"mode: {report.mode}   engine: {report.engine}"]
    for name, value in report.results.items():
        lines.append(f"  {name:28s} {_fmt(value)}")
    if report.rows:
        lines.append("  " + "  ".join(f"{c:>12s}" for c in SWEEP_CSV_HEADER.split(",")))
        for row in report.rows:
            lines.append(
                "  " + "  ".join(
                    f"{row[c]:12.6g}" if isinstance(row[c], (int, float)) else f"{row[c]:>12s}"
                    for c in SWEEP_CSV_HEADER.split(",")
                )
            )
    for chk in report.checks:
        status = "PASS" if chk["passed"] else "FAIL"
        lines.append(f"  [{status}] {chk['name']}: {chk['value']:.6g} {chk['relation']} {chk['bound']:.6g}")
    for note in report.notes:
        lines.append(f"  note: {note}")
    lines.append(f"  wall time: {report.wall_time_s:.3f}s")
    return "\n".join(lines) + "\n"


def render(report: RunReport, fmt: str = "json") -> str:
    if fmt == "json":
        return report_json(report)
    if fmt == "csv":
        return report_csv(report)
    if fmt == "text":
        return report_text(report)
    raise InvalidArgument(f"unknown format {fmt!r}")


def emit_report(report: RunReport, fmt: str = "json", out: Optional[str] = None) -> str:
    """Render ``report`` and write it to ``out`` (a path) if given.

    Raises :class:`OSError` when the destination cannot be written.
    """
    text = render(report, fmt)
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# -- config files --------------------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def parse_grid(text: str) -> tuple[int, ...]:
    """Comma-separated sizes; ``2^k`` is accepted for powers of two."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            if "^" in tok:
                base, exp = tok.split("^")
                out.append(int(base) ** int(exp))
            else:
                out.append(int(tok))
        except ValueError:
            raise ConfigError("grid", f"cannot parse {tok!r}") from None
    return tuple(out)


def coerce(key: str, value: str):
    """Convert a textual config value for field ``key``."""
    key = key.replace("-", "_").lower()
    if key == "n":
        key = "N"
    if key not in _FIELD_TYPES:
        raise ConfigError(key, "unknown configuration key")
    value = value.strip()
    if key == "grid":
        return key, parse_grid(value)
    if value.lower() in ("", "none"):
        return key, None
    try:
        if key in ("N", "max_rounds", "trials", "seed", "sweep_trials", "threads"):
            return key, int(value)
        if key in ("delta", "p", "corollary_q", "epsilon", "c"):
            if "/" in value:
                num, den = value.split("/")
                return key, float(num) / float(den)
            return key, float(value)
    except ValueError:
        raise ConfigError(key, f"cannot parse {value!r}") from None
    return key, value


def load_config_file(path: str) -> dict:
    """Read a flat ``key = value`` file (``#`` comments) into config overrides."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    with open(path, encoding="utf-8") as fh:
        parser.read_string("[run]\n" + fh.read())
    return dict(coerce(k, v) for k, v in parser["run"].items())
