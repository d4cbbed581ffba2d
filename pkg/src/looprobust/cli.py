"""Command-line pipelines: ``check``, ``conditions``, ``frontier``, ``trace``.

Settings are merged from, in increasing priority: built-in defaults, a flat
``key = value`` config file (``--config``), environment variables named
``LOOPROBUST_<KEY>`` and command-line flags.  Reports are written under the
output directory with a name derived from a hash of the resolved settings,
so identical settings always give an identical file.

Exit status: 0 if every check passed, 1 if any failed, 2 for a malformed
configuration, 3 if a program did not terminate.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import report
from .conditions import ConditionConstants, calibrate_C1, calibrate_C2, certify, compose_bound
from .programs.registry import PROGRAMS, build, constants_for
from .robustness import RobustnessSpec, check, estimate_frontier
from .schema import NonTermination, trace

ENV_PREFIX = "LOOPROBUST_"
COMMANDS = ("check", "conditions", "frontier", "trace")
CALIBRATION_GUARD = 1e-12

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NONTERM = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def _real(text: str) -> float:
    v = float(text)
    if math.isnan(v):
        raise ValueError("nan is not allowed")
    return v


def _grid(text: str) -> tuple:
    return tuple(_real(t) for t in text.split(",") if t.strip())


@dataclass(frozen=True)
class RunConfig:
    program: str = ""
    mode: str = "double"
    delta: float = math.inf
    pairs: int = 1000
    triples: int = 1000
    traces: int = 8
    seed: int = 0
    k_grid: tuple = (0.0, 0.0625, 0.25, 0.5, 1.0, 2.0)
    k: float | None = None
    epsilon: float | None = None
    constants: str = ""
    graph: str = ""
    e: float = 1e-6
    w: int = 6
    input: str = ""
    calibration_tol: float = 1e-9
    out: str = "reports"

    def validate(self, command: str) -> None:
        if not self.program:
            raise ConfigError("program: required")
        if self.program not in PROGRAMS:
            raise ConfigError(f"program: unknown {self.program!r} (known: {', '.join(sorted(PROGRAMS))})")
        if self.mode not in ("double", "exact"):
            raise ConfigError(f"mode: must be 'double' or 'exact', got {self.mode!r}")
        if self.mode == "exact" and self.program != "dijkstra":
            raise ConfigError("mode: exact is only available for dijkstra")
        for name in ("pairs", "triples", "traces"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name}: must be >= 1, got {getattr(self, name)}")
        if not self.delta >= 0:
            raise ConfigError(f"delta: must be >= 0 or inf, got {self.delta!r}")
        if not self.k_grid or any(b < a for a, b in zip(self.k_grid, self.k_grid[1:])):
            raise ConfigError("k_grid: must be a nonempty ascending list")
        if any(k < 0 for k in self.k_grid):
            raise ConfigError("k_grid: entries must be nonnegative")
        if (self.k is None) != (self.epsilon is None):
            raise ConfigError("k and epsilon must be given together")
        if not self.e > 0:
            raise ConfigError(f"e: must be positive, got {self.e!r}")
        if command == "trace" and not self.input:
            raise ConfigError("input: required for the trace command")

    def canonical(self) -> str:
        lines = []
        for f in fields(self):
            if f.name == "out":
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            lines.append(f"{f.name}={v!r}")
        for name in ("constants", "graph"):
            path = getattr(self, name)
            if path:
                digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
                lines.append(f"{name}_sha256={digest}")
        return "\n".join(lines) + "\n"


_PARSERS = {
    "program": str, "mode": str, "constants": str, "graph": str, "input": str, "out": str,
    "delta": _real, "k": _real, "epsilon": _real, "e": _real, "calibration_tol": _real,
    "pairs": int, "triples": int, "traces": int, "seed": int, "w": int,
    "k_grid": _grid,
}


def _coerce(key: str, raw: str, where: str):
    key = key.strip().replace("-", "_")
    if key not in _PARSERS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    try:
        return key, _PARSERS[key](raw.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key}: {raw.strip()!r} ({exc})") from None


def parse_config_text(text: str, source: str = "config") -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = line.split("=", 1)
        k, v = _coerce(key, raw, f"{source}:{lineno}")
        values[k] = v
    return values


def _env_values(env) -> dict:
    values = {}
    for name in sorted(env):
        if name.startswith(ENV_PREFIX):
            k, v = _coerce(name[len(ENV_PREFIX):].lower(), env[name], f"env {name}")
            values[k] = v
    return values


def resolve_config(command: str, args: argparse.Namespace, env=None) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from None
        values.update(parse_config_text(text, args.config))
    values.update(_env_values(os.environ if env is None else env))
    for key in _PARSERS:
        raw = getattr(args, key, None)
        if raw is not None:
            k, v = _coerce(key, str(raw), f"--{key.replace('_', '-')}")
            values[k] = v
    cfg = RunConfig(**values)
    cfg.validate(command)
    for name in ("constants", "graph"):
        path = getattr(cfg, name)
        if path and not Path(path).is_file():
            raise ConfigError(f"{name}: no such file {path!r}")
    return cfg


def choose_constants(frontier, tol: float) -> tuple:
    """Pick a calibrated (k, eps): smallest k whose eps is below ``tol``.

    The fitted eps is doubled and padded by a fixed guard so that fresh
    samples, which were not part of the fit, are still covered.
    """
    k, eps = next(((k, e) for k, e in frontier if e <= tol), frontier[-1])
    return k, 2 * eps + CALIBRATION_GUARD


def _load_constants(cfg: RunConfig, bundle, calibration: dict) -> ConditionConstants:
    if cfg.constants:
        try:
            consts = ConditionConstants.from_text(Path(cfg.constants).read_text())
        except ValueError as exc:
            raise ConfigError(f"constants {cfg.constants}: {exc}") from None
        return ConditionConstants(**{**consts.__dict__, "delta": cfg.delta})
    known = dict(bundle.known_constants or {})
    prog = bundle.program
    if prog is None:
        raise ConfigError(f"program {cfg.program!r} has no schema form; give k and epsilon")
    cal_sampler = bundle.pairs(cfg.delta, cfg.seed + 1)
    if "k_Nstar" not in known:
        fr = calibrate_C1(prog, bundle.trace_sources(cfg.seed + 1, cfg.traces), cal_sampler,
                          cfg.pairs, cfg.k_grid)
        calibration["C1"] = fr
        known["k_Nstar"], known["eps_Nstar"] = choose_constants(fr, cfg.calibration_tol)
    if "k_A" not in known:
        fr = calibrate_C2(prog, cal_sampler, cfg.pairs, cfg.k_grid)
        calibration["C2"] = fr
        known["k_A"], known["eps_2"] = choose_constants(fr, cfg.calibration_tol)
    return constants_for(bundle, cfg.delta, **known)


def _write(cfg: RunConfig, command: str, suffix: str, text: str) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256((command + "\n" + cfg.canonical()).encode()).hexdigest()[:16]
    stem = f"{command}-{cfg.program}-{digest}"
    path = out / f"{stem}{suffix}"
    n = 0
    # append-only: never overwrite a report with different content
    while path.exists():
        if path.read_text() == text:
            return path
        n += 1
        path = out / f"{stem}.{n}{suffix}"
    path.write_text(text)
    return path


def _document(command: str, cfg: RunConfig, body: dict) -> str:
    settings = {f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name != "out"}
    return report.dumps({"command": command, "settings": settings, **body})


def run_command(command: str, cfg: RunConfig) -> tuple:
    """Execute one pipeline; returns ``(exit_status, report_path)``."""
    try:
        bundle = build(cfg.program, {"mode": cfg.mode, "e": cfg.e, "w": cfg.w,
                                     "graph": cfg.graph})
    except (OSError, ValueError) as exc:
        raise ConfigError(f"program {cfg.program}: {exc}") from None

    if command == "trace":
        if bundle.program is None:
            raise ConfigError(f"program {cfg.program!r} has no schema form")
        try:
            i = bundle.parse_input(cfg.input)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"input: {exc}") from None
        try:
            text = trace(bundle.program, i).to_text()
        except NonTermination as exc:
            print(f"non-termination: {exc}", file=sys.stderr)
            return EXIT_NONTERM, None
        sys.stdout.write(text)
        return EXIT_OK, _write(cfg, command, ".txt", text)

    sampler = bundle.pairs(cfg.delta, cfg.seed)

    if command == "frontier":
        rep = estimate_frontier(bundle.function, sampler, cfg.delta, cfg.pairs, cfg.k_grid,
                                bundle.d_output)
        path = _write(cfg, command, ".json", _document(command, cfg, {"report": rep}))
        return (EXIT_OK if rep.passed else EXIT_FAILED), path

    if command == "check":
        calibration: dict = {}
        if cfg.k is not None:
            k, eps = cfg.k, cfg.epsilon
        else:
            bound = compose_bound(_load_constants(cfg, bundle, calibration))
            k, eps = bound.k0, bound.eps0
        spec = RobustnessSpec(k, eps, cfg.delta, bundle.d_input, bundle.d_output)
        rep = check(bundle.function, sampler, spec, cfg.pairs)
        body = {"report": rep}
        if calibration:
            body["calibration"] = calibration
        path = _write(cfg, command, ".json", _document(command, cfg, body))
        no_output = any(v.kind == "no-output" for v in rep.violations)
        status = EXIT_NONTERM if no_output else (EXIT_OK if rep.passed else EXIT_FAILED)
        return status, path

    if command == "conditions":
        if bundle.program is None:
            raise ConfigError(f"program {cfg.program!r} has no schema form")
        calibration = {}
        try:
            consts = _load_constants(cfg, bundle, calibration)
            cert = certify(
                bundle.program, consts,
                trace_sources=bundle.trace_sources(cfg.seed, cfg.traces),
                input_sampler=sampler,
                triple_sampler=bundle.triples(cfg.delta, cfg.seed),
                witness=bundle.witness,
                region_sampler=bundle.region(cfg.seed),
                n_pairs=cfg.pairs,
                n_triples=cfg.triples,
                extra_traces=bundle.extra_traces(cfg.seed, cfg.traces),
                c1_pairs=max(1, cfg.pairs // cfg.traces),
            )
        except ValueError as exc:
            if isinstance(exc.__cause__, NonTermination):
                text = _document(command, cfg, {"error": str(exc), "calibration": calibration})
                path = _write(cfg, command, ".json", text)
                print(f"non-termination: {exc}", file=sys.stderr)
                return EXIT_NONTERM, path
            raise
        body = {"certificate": cert}
        if calibration:
            body["calibration"] = calibration
        path = _write(cfg, command, ".json", _document(command, cfg, body))
        return (EXIT_OK if cert.passed else EXIT_FAILED), path

    raise ConfigError(f"unknown command {command!r}")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="looprobust",
        description="Sampled robustness analysis of loop programs.",
        epilog=f"Any setting can also come from a LOOPROBUST_<KEY> environment variable "
               f"(e.g. {ENV_PREFIX}SEED=3) or a key = value config file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value settings file")
        p.add_argument("--program", help=f"one of: {', '.join(sorted(PROGRAMS))}")
        p.add_argument("--mode", help="double (default) or exact (dijkstra only)")
        p.add_argument("--delta", help="input distance bound; 'inf' allowed")
        p.add_argument("--pairs", help="number of sampled input pairs")
        p.add_argument("--triples", help="number of sampled C3/C4 triples")
        p.add_argument("--traces", help="number of trace sources for C1")
        p.add_argument("--seed", help="sampling seed")
        p.add_argument("--out", help="report directory")
        p.add_argument("--constants", help="file of condition constants")
        p.add_argument("--graph", help="dijkstra graph file")
        p.add_argument("--e", help="cordic precision")
        p.add_argument("--w", help="dijkstra vertex count for random graphs")
        p.add_argument("--k", help="Lipschitz factor for check")
        p.add_argument("--epsilon", help="additive slack for check")
        p.add_argument("--k-grid", dest="k_grid", help="comma-separated ascending k values")
        p.add_argument("--calibration-tol", dest="calibration_tol")
        p.add_argument("--input", help="input for trace: a real or a graph file")
    return parser


def main(argv=None, env=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args, env)
        status, path = run_command(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if path is not None:
        print(f"{'PASS' if status == EXIT_OK else 'FAIL'} {path}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
