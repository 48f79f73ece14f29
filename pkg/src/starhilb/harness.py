"""
Command-line front end: run a named suite over a parameter grid and emit a
JSON report (plus a CSV table of sweep points).

    starhilb verify --suite frobenius --kappas 8,32
    starhilb sweep --suite sweep-dirac --omegas 4,8,16,32 --out dirac.csv

Exit status: 0 all asserted checks passed, 1 a check failed, 2 bad
configuration, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from starhilb import analysis, circleqm, core, frobenius
from starhilb.errors import CheckFailed, ConfigInvalid, IoError

SUITES = ("core", "frobenius", "circle", "sweep-weakfunctor", "sweep-dirac", "all")
KAPPA_SUITES = ("core", "frobenius", "sweep-weakfunctor")
OMEGA_SUITES = ("circle", "sweep-dirac")
SWEEP_SUITES = ("sweep-weakfunctor", "sweep-dirac")
DEFAULT_KAPPAS = (8, 16, 32, 64)
DEFAULT_OMEGAS = (4, 8, 16, 32)
CONFIG_KEYS = ("command", "suite", "kappas", "omegas", "L", "seed", "tolerance", "threshold", "out")


@dataclass(frozen=True)
class RunConfig:
    suite: str
    kappas: tuple | None = None
    omegas: tuple | None = None
    L: float = 1.0
    seed: int = 0
    tolerance: float = core.EXACT_TOL
    threshold: float = analysis.DEFAULT_THRESHOLD
    out_path: str | None = None
    command: str = "verify"

    def __post_init__(self):
        if self.command not in ("verify", "sweep"):
            raise ConfigInvalid(f"command: unknown command {self.command!r}")
        if self.suite not in SUITES:
            raise ConfigInvalid(f"suite: unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.command == "sweep" and self.suite not in SWEEP_SUITES:
            raise ConfigInvalid(f"suite: 'sweep' runs one of {', '.join(SWEEP_SUITES)}, not {self.suite!r}")
        for key in ("kappas", "omegas"):
            vals = getattr(self, key)
            if vals is None:
                continue
            vals = tuple(vals)
            if not vals or any(not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1 for v in vals):
                raise ConfigInvalid(f"{key}: expected positive integers, got {list(vals)}")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ConfigInvalid(f"{key}: values must be strictly ascending, got {list(vals)}")
            object.__setattr__(self, key, tuple(int(v) for v in vals))
        if not (isinstance(self.L, (int, float)) and math.isfinite(self.L) and self.L > 0):
            raise ConfigInvalid(f"L: circumference must be a positive real, got {self.L!r}")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ConfigInvalid(f"seed: must be an unsigned 64-bit integer, got {self.seed!r}")
        for key in ("tolerance", "threshold"):
            v = getattr(self, key)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigInvalid(f"{key}: must be a positive real, got {v!r}")
        for suite in self.suites():
            params = self.params_for(suite)
            if suite in SWEEP_SUITES and len(params) < 3:
                raise ConfigInvalid(f"{'omegas' if suite in OMEGA_SUITES else 'kappas'}: "
                                    f"suite {suite} needs at least 3 sweep points, got {len(params)}")

    def suites(self) -> tuple:
        return tuple(s for s in SUITES if s != "all") if self.suite == "all" else (self.suite,)

    def params_for(self, suite: str) -> tuple:
        """Parameter grid of a suite: ``kappa`` for matrix suites, ``omega`` for circle suites.

        Either grid may be given for either kind of suite; ``kappa = 2 omega + 1``.
        """
        if suite in OMEGA_SUITES:
            if self.omegas is not None:
                return self.omegas
            if self.kappas is not None:
                even = [k for k in self.kappas if k % 2 == 0]
                if even:
                    raise ConfigInvalid(f"kappas: circle suites need odd kappa = 2*omega+1, got {even}")
                return tuple((k - 1) // 2 for k in self.kappas)
            return DEFAULT_OMEGAS
        if self.kappas is not None:
            return self.kappas
        if self.omegas is not None:
            return tuple(2 * w + 1 for w in self.omegas)
        return DEFAULT_KAPPAS

    def echo(self) -> dict:
        d = asdict(self)
        d["kappas"] = list(self.kappas) if self.kappas is not None else None
        d["omegas"] = list(self.omegas) if self.omegas is not None else None
        return d


# ----------------------------------------------------------------------------
# parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigInvalid(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="starhilb", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("verify", "run a verification suite"), ("sweep", "run a convergence sweep")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--suite", choices=SUITES)
        s.add_argument("--kappas", type=_int_list)
        s.add_argument("--omegas", type=_int_list)
        s.add_argument("--L", type=float)
        s.add_argument("--seed", type=int)
        s.add_argument("--tolerance", type=float)
        s.add_argument("--threshold", type=float, help="final-residual threshold for sweep verdicts")
        s.add_argument("--out", help="report path (.json, or .csv for the sweep table)")
        s.add_argument("--config", help="JSON file with defaults; command-line flags take precedence")
    return p


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigInvalid(f"config {path} must hold a JSON object")
    for key in data:
        if key not in CONFIG_KEYS:
            raise ConfigInvalid(f"{key}: unknown configuration key")
    return data


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    args = _build_parser().parse_args(list(sys.argv[1:] if argv is None else argv))
    values = load_config_file(args.config) if args.config else {}
    if "command" in values and values["command"] != args.command:
        raise ConfigInvalid(f"command: config file says {values['command']!r}, command line says {args.command!r}")
    for key in CONFIG_KEYS[1:]:
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if "suite" not in values:
        raise ConfigInvalid("suite: no suite given")
    out = values.pop("out", None)
    for key in ("kappas", "omegas"):
        if values.get(key) is not None:
            values[key] = tuple(values[key])
    try:
        return RunConfig(command=args.command, out_path=out, **{k: v for k, v in values.items() if k != "command"})
    except TypeError as exc:
        raise ConfigInvalid(str(exc)) from None


# ----------------------------------------------------------------------------
# checks


@dataclass
class CheckRecord:
    name: str
    param: int
    residual: float | None
    passed: bool
    #: sweep points are recorded but judged only through the sweep verdict
    asserted: bool = True
    seconds: float = 0.0
    error: str | None = None

    def to_json(self, timing: bool = True) -> dict:
        d = {"name": self.name, "param": self.param, "passed": self.passed, "asserted": self.asserted,
             "residual": self.residual if self.residual is not None and math.isfinite(self.residual) else None}
        if self.error:
            d["error"] = self.error
        if timing:
            d["seconds"] = self.seconds
        return d


@dataclass
class SuiteReport:
    config: RunConfig
    records: list = field(default_factory=list)
    sweeps: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records if r.asserted)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def failures(self) -> list:
        return [r for r in self.records if r.asserted and not r.passed]

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "config": self.config.echo(),
            "checks": [r.to_json(timing) for r in self.records],
            "sweeps": {name: {"parameter_values": list(s.parameter_values), "residuals": list(s.residuals),
                              **s.sidecar()} for name, s in sorted(self.sweeps.items())},
            "verdict": self.verdict,
        }
        if timing:
            d["total_seconds"] = self.seconds
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    def csv_rows(self) -> list:
        return [(r.param, r.name, r.residual) for r in self.records if not r.asserted]

    def write(self, out_path: str) -> tuple[str, str]:
        """Write the JSON report and the sweep CSV; returns ``(json_path, csv_path)``."""
        stem, ext = os.path.splitext(out_path)
        json_path, csv_path = (stem + ".json", out_path) if ext.lower() == ".csv" else (out_path, stem + ".csv")
        try:
            with open(json_path, "w") as fh:
                fh.write(self.to_json() + "\n")
            with open(csv_path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["param", "check", "residual"])
                for p, name, r in self.csv_rows():
                    w.writerow([p, name, repr(float(r)) if r is not None else "nan"])
        except OSError as exc:
            raise IoError(f"cannot write report: {exc}") from exc
        return json_path, csv_path


@dataclass(frozen=True)
class _Task:
    name: str
    param: int
    fn: Callable  # rng -> {check name: residual} or residual
    asserted: bool = True


def _rng(seed: int, name: str, param: int) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode()), param])


def _unit_random(rng, rows, cols):
    m = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return m / np.linalg.norm(m, 2)


def _core_checks(k: int, rng) -> dict[str, float]:
    """Category, monoidal, dagger and compact-closure laws at ``kappa = k``."""
    H, S = core.standard(k), core.standard(3)
    mk = lambda a, b, rows, cols: core.Morphism(a, b, _unit_random(rng, rows, cols))  # noqa: E731
    f, g, h = mk(H, H, k, k), mk(H, H, k, k), mk(H, H, k, k)
    s1, s2 = mk(S, S, 3, 3), mk(S, S, 3, 3)
    op = analysis.operator_norm
    out = {
        "associativity": op((h @ (g @ f)).mat - ((h @ g) @ f).mat),
        "unit_law": max(op((core.identity(H) @ f).mat - f.mat), op((f @ core.identity(H)).mat - f.mat)),
        "interchange": op(core.tensor(f, s1).mat @ core.tensor(g, s2).mat - core.tensor(f @ g, s1 @ s2).mat),
        "dagger_involution": op(core.dagger(core.dagger(f)).mat - f.mat),
        "dagger_contravariance": op(core.dagger(g @ f).mat - (core.dagger(f) @ core.dagger(g)).mat),
        "dagger_tensor": op(core.dagger(core.tensor(f, s1)).mat - core.tensor(core.dagger(f), core.dagger(s1)).mat),
    }
    sab, sba = core.braiding(H, S), core.braiding(S, H)
    out["braiding_symmetry"] = op((sba @ sab).mat - np.eye(3 * k))
    out["braiding_naturality"] = op((sab @ core.tensor(f, s1)).mat - (core.tensor(s1, f) @ sab).mat)
    nu = min(k, 16)
    bad = sum(core.varsigma_inv(core.varsigma(n, m, nu, k), nu, k) != (n, m)
              for n in range(1, k + 1) for m in range(1, nu + 1))
    out["varsigma_roundtrip"] = float(bad)
    out["snake"] = max(frobenius.snake_residuals(frobenius.compact_structure(H)))
    out["loop_dimension"] = abs(frobenius.loop(H) - k)
    out["trace_identity"] = abs(frobenius.trace(core.identity(H)) - k)
    out["trace_cyclicity"] = abs(frobenius.trace(g @ f) - frobenius.trace(f @ g))
    pt = frobenius.partial_trace(core.tensor(f, s1), (k, k, 3))
    out["partial_trace"] = op(pt.mat - frobenius.trace(s1) * f.mat)
    out["hs_inner"] = abs(frobenius.hs_inner(f, f) - np.linalg.norm(f.mat) ** 2)
    return out


def _frobenius_checks(k: int, rng) -> dict[str, float]:
    return frobenius.check_axioms(frobenius.classical_structure(core.standard(k)))


def _weak_functor_generator() -> analysis.StandardMapGenerator:
    return analysis.StandardMapGenerator(lambda m, n: 2.0 ** (-m - n), declared_bound=1.0 / 3.0)


def _tasks(cfg: RunConfig) -> list[_Task]:
    tasks = []
    L = cfg.L
    for suite in cfg.suites():
        params = cfg.params_for(suite)
        for p in params:
            if suite == "core":
                tasks.append(_Task("core", p, lambda rng, p=p: _core_checks(p, rng)))
            elif suite == "frobenius":
                tasks.append(_Task("frobenius", p, lambda rng, p=p: _frobenius_checks(p, rng)))
            elif suite == "circle":
                tasks.append(_Task("circle", p, lambda rng, p=p: circleqm.circle_checks(
                    circleqm.CircleSpace(L, p), seed=int(rng.integers(2**32)))))
            elif suite == "sweep-weakfunctor":
                gen = _weak_functor_generator()
                tasks.append(_Task("weak_functoriality", p,
                                   lambda rng, p=p, gen=gen: analysis.weak_functoriality_residual(gen, gen, p),
                                   asserted=False))
            elif suite == "sweep-dirac":
                tasks.append(_Task("dirac_pairing", p, lambda rng, p=p: circleqm.dirac_sweep_point(L, p),
                                   asserted=False))
    return tasks


def _threads() -> int:
    env = os.environ.get("STARHILB_THREADS")
    if env is None:
        return os.cpu_count() or 1
    try:
        n = int(env)
    except ValueError:
        raise ConfigInvalid(f"STARHILB_THREADS must be a positive integer, got {env!r}") from None
    if n < 1:
        raise ConfigInvalid(f"STARHILB_THREADS must be a positive integer, got {env!r}")
    return n


def _execute(task: _Task, cfg: RunConfig) -> list[CheckRecord]:
    t0 = time.perf_counter()
    try:
        value = task.fn(_rng(cfg.seed, task.name, task.param))
    except Exception as exc:  # a crashing check is a failed check, never a skipped one
        return [CheckRecord(task.name, task.param, None, False, task.asserted, time.perf_counter() - t0,
                            f"{type(exc).__name__}: {exc}")]
    dt = time.perf_counter() - t0
    items = value.items() if isinstance(value, dict) else [(None, value)]
    recs = []
    for sub, r in items:
        name = task.name if sub is None else f"{task.name}.{sub}"
        r = float(r)
        ok = math.isfinite(r) and (not task.asserted or r <= cfg.tolerance)
        recs.append(CheckRecord(name, task.param, r, ok, task.asserted, dt / len(items),
                                None if math.isfinite(r) else "non-finite residual"))
    return recs


def _sweep_record(name: str, points: list[CheckRecord], cfg: RunConfig, report: SuiteReport) -> CheckRecord:
    params = [r.param for r in points]
    vname = f"{name}.verdict"
    if any(r.residual is None or not math.isfinite(r.residual) for r in points):
        return CheckRecord(vname, params[-1], None, False, error="sweep point failed")
    sw = analysis.make_report(params, [r.residual for r in points], threshold=cfg.threshold)
    report.sweeps[name] = sw
    ok = sw.verdict is analysis.Verdict.INFINITESIMAL and sw.fitted_rate < 0
    return CheckRecord(vname, params[-1], sw.residuals[-1], ok, error=None if ok else f"verdict {sw.verdict.value}")


def run(cfg: RunConfig) -> SuiteReport:
    """Run every check of the configured suite(s); writes files if ``cfg.out_path`` is set."""
    t0 = time.perf_counter()
    tasks = _tasks(cfg)
    with ThreadPoolExecutor(max_workers=max(1, min(_threads(), len(tasks)))) as pool:
        results = list(pool.map(lambda t: _execute(t, cfg), tasks))
    report = SuiteReport(cfg)
    records = [r for rs in results for r in rs]
    for name in sorted({r.name for r in records if not r.asserted}):
        pts = sorted((r for r in records if r.name == name), key=lambda r: r.param)
        records.append(_sweep_record(name, pts, cfg, report))
    report.records = sorted(records, key=lambda r: (r.name, r.param))
    report.seconds = time.perf_counter() - t0
    if cfg.out_path:
        report.write(cfg.out_path)
    return report


def _summary(report: SuiteReport) -> str:
    lines = []
    for r in report.records:
        mark = "ok  " if r.passed else "FAIL"
        res = "n/a" if r.residual is None else f"{r.residual:.3e}"
        tail = f"  ({r.error})" if r.error else ""
        lines.append(f"{mark} {r.name:<48} {r.param:>5} {res}{tail}")
    for name, s in sorted(report.sweeps.items()):
        lines.append(f"sweep {name}: rate {s.fitted_rate:.3g}, verdict {s.verdict.value}")
    n_ok = sum(r.passed for r in report.records if r.asserted)
    n_all = sum(r.asserted for r in report.records)
    lines.append(f"{report.verdict}: {n_ok}/{n_all} asserted checks passed in {report.seconds:.2f}s")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
        report = run(cfg)
        print(_summary(report))
        if not report.passed:
            raise CheckFailed(f"{len(report.failures())} check(s) failed")
        return 0
    except (ConfigInvalid, CheckFailed, IoError) as exc:
        print(f"starhilb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
