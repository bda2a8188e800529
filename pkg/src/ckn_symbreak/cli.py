"""Command line runner: ``ckn-symbreak <subcommand> [options]``.

Exit codes: 0 success, 2 a check or assertion failed, 1 usage or configuration error.
Options may also come from a flat ``key = value`` file given by ``--config``;
flags on the command line override it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .checks import SUITES, CheckRow
from .constants import constants_table, validate_params
from .errors import CKNError, ModeTruncationError, NotConverged
from .minimize import (
    MinimizeConfig,
    lambda_sweep,
    minimize_radial,
    minimize_sector,
    multistart_radial,
    sector_compare,
)
from .spherical import eigenpair_degree

SUBCOMMANDS = ("constants", "check", "minimize-radial", "minimize-sector", "sweep", "sector-compare")

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# config files


@dataclass
class RunConfig:
    """A subcommand with its options as flag-name -> string value."""

    subcommand: str
    options: Dict[str, str] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"subcommand = {self.subcommand}"]
        lines += [f"{k} = {v}" for k, v in sorted(self.options.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, subcommand: Optional[str] = None) -> "RunConfig":
        opts: Dict[str, str] = {}
        for num, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line {num}: expected 'key = value', got {raw!r}")
            key, val = (p.strip() for p in line.split("=", 1))
            opts[key.replace("_", "-")] = val
        sub = opts.pop("subcommand", None) or subcommand
        if sub is None:
            raise UsageError("config file has no subcommand and none was given")
        return cls(sub, opts)

    def to_argv(self) -> List[str]:
        argv = []
        for k, v in self.options.items():
            argv += [f"--{k}", v]
        return argv


def _float_text(x) -> str:
    return repr(float(x))


def _options_from_namespace(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> Dict[str, str]:
    opts = {}
    for action in parser._actions:
        if not action.option_strings or action.dest in ("help", "config", "out"):
            continue
        val = getattr(ns, action.dest, None)
        if val is None:
            continue
        flag = action.option_strings[-1].lstrip("-")
        if isinstance(val, (list, tuple)):
            opts[flag] = ",".join(_float_text(v) if isinstance(v, float) else str(v) for v in val)
        elif isinstance(val, float):
            opts[flag] = _float_text(val)
        else:
            opts[flag] = str(val)
    return opts


# ---------------------------------------------------------------------------
# output


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable, ensure_ascii=False) + "\n"


def csv_text(subcommand: str, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# ckn-symbreak v{__version__} {subcommand}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Emitter:
    """Collects artifacts; writes them under ``out`` or prints the JSON."""

    def __init__(self, subcommand: str, out: Optional[str]):
        self.subcommand = subcommand
        self.out = out
        self.files: Dict[str, str] = {}

    def json(self, obj, name: Optional[str] = None):
        self.files[name or f"{self.subcommand}.json"] = dumps(obj)

    def csv(self, header, rows, name: Optional[str] = None):
        self.files[name or f"{self.subcommand}.csv"] = csv_text(self.subcommand, header, rows)

    def flush(self, stream=None):
        stream = stream or sys.stdout
        if self.out is None:
            stream.write(self.files.get(f"{self.subcommand}.json", ""))
            return
        for name, text in sorted(self.files.items()):
            write_atomic(os.path.join(self.out, name), text)


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _c_hat(text: str):
    if text == "default":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number or 'default', got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_params(p, need_q=True, n_default=None):
    p.add_argument("--n", type=int, default=n_default, help="dimension (>= 2)")
    p.add_argument("--s", type=float, help="fractional order in (0, 1)")
    if need_q:
        p.add_argument("--q", type=float, help="exponent in (2, 2n/(n-2s))")
    p.add_argument("--lambda", dest="lam", type=float, help="Hardy coefficient (> -H_s)")
    p.add_argument("--m", type=int, help="number of blocks")
    p.add_argument("--k", type=int, help="block dimension")
    p.add_argument("--c-hat", dest="c_hat", type=_c_hat, help="slice-Hardy constant: number or 'default'")


def _add_solver(p):
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--half-range", dest="half_range", type=float, help="half width of the ln r grid")
    p.add_argument("--nodes", type=int, help="number of ln r nodes")
    p.add_argument("--spacing", type=float, help="grid spacing factor")
    p.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap")
    p.add_argument("--el-tol", dest="el_tol", type=float, help="Euler-Lagrange residual tolerance")
    p.add_argument("--mode-factor", dest="mode_factor", type=int, help="keep modes up to factor * t")
    p.add_argument("--max-mode", dest="max_mode", type=int, help="highest angular mode kept")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ckn-symbreak", description="Symmetry breaking experiments for weighted fractional Hardy-Sobolev quotients.")
    parser.add_argument("--version", action="version", version=f"ckn-symbreak {__version__}")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key = value file of defaults")
        p.add_argument("--out", help="output directory (default: print JSON)")
        return p

    p = add("constants", "print the constants of a parameter set")
    _add_params(p)
    p.add_argument("--mu", type=float, help="Laplace-Beltrami eigenvalue")

    p = add("check", "run a conformance suite")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default=None)
    _add_params(p, need_q=False)

    p = add("minimize-radial", "radial minimizer of J_lambda")
    _add_params(p)
    _add_solver(p)
    p.add_argument("--starts", type=int, help="number of seeded starts (default 1)")

    p = add("minimize-sector", "Z_t-sector minimizer for n = 2")
    _add_params(p)
    _add_solver(p)
    p.add_argument("--t", type=int, help="sector order t >= 1")

    p = add("sweep", "lambda sweep with second-variation certificates")
    _add_params(p)
    _add_solver(p)
    p.add_argument("--lambda-min", dest="lambda_min", type=float)
    p.add_argument("--lambda-max", dest="lambda_max", type=float)
    p.add_argument("--lambda-steps", dest="lambda_steps", type=int, help="grid points (default 14)")
    p.add_argument("--lambdas", type=_float_list, help="explicit comma-separated lambda values")
    p.add_argument("--mode", type=_int_list, help="comma-separated harmonic degrees (default 1,2,3)")
    p.add_argument("--tolerance", type=float, help="certificate relative tolerance (default 1e-4)")
    p.add_argument("--lambda-tol", dest="lambda_tol", type=float, help="bisection bracket width (default 1e-2)")

    p = add("sector-compare", "compare u_t, v_t and u_T for n = 2")
    _add_params(p)
    _add_solver(p)
    p.add_argument("--t", type=int)
    p.add_argument("--h", type=int)
    return parser


def _require(ns, *names):
    missing = [n for n in names if getattr(ns, n, None) is None]
    if missing:
        flags = ", ".join("--" + ("lambda" if n == "lam" else n.replace("_", "-")) for n in missing)
        raise UsageError(f"{ns.subcommand}: missing required option(s) {flags}")


def _params(ns, need_q=True):
    _require(ns, "n", "s", *(("q",) if need_q else ()))
    return validate_params(ns.n, ns.s, ns.q, lam=ns.lam or 0.0, m=ns.m or 1, k=ns.k, c_hat=ns.c_hat)


def _solver_config(ns, **extra) -> MinimizeConfig:
    kw = {k: getattr(ns, k) for k in ("seed", "half_range", "nodes", "spacing", "max_iter", "el_tol",
                                      "mode_factor", "max_mode") if getattr(ns, k, None) is not None}
    kw.update(extra)
    return MinimizeConfig(**kw)


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(ns, em: Emitter) -> int:
    params = _params(ns)
    table = constants_table(params, ns.mu)
    out = {"params": params.to_dict(), "constants": table.to_dict()}
    if table.gamma is not None:
        out["constants"]["gamma_reference"] = math.pi / (2 * math.sin(math.pi * params.s)) * params.c_hat
    em.json(out)
    return EXIT_OK


def _check_rows(ns) -> List[CheckRow]:
    suites = sorted(SUITES) if ns.suite in (None, "all") else [ns.suite]
    rows: List[CheckRow] = []
    for name in suites:
        if name in ("extension", "lemma"):
            _require(ns, "n", "s")
        if name == "extension":
            rows += SUITES[name](ns.n, ns.s)
        elif name == "lemma":
            rows += SUITES[name](ns.n, ns.s, c_hat=ns.c_hat)
        elif name == "algebra" and ns.s is not None:
            rows += SUITES[name]((ns.s,))
        else:
            rows += SUITES[name]()
    return rows


def cmd_check(ns, em: Emitter) -> int:
    rows = _check_rows(ns)
    header = ("check", "lhs", "rhs", "margin", "tolerance", "pass", "residual")
    em.csv(header, [(r.check, r.lhs, r.rhs, r.margin, r.tolerance, r.passed, r.residual) for r in rows])
    failed = [r.check for r in rows if not r.passed]
    em.json({"suite": ns.suite or "all", "n": ns.n, "s": ns.s, "rows": [r.to_dict() for r in rows],
             "failed": failed, "passed": not failed})
    return EXIT_FAILED if failed else EXIT_OK


def _profile_rows(field):
    return list(zip(field.grid.nodes, field.values))


def cmd_minimize_radial(ns, em: Emitter) -> int:
    params = _params(ns)
    config = _solver_config(ns)
    results = multistart_radial(params, config, ns.starts) if ns.starts else [minimize_radial(params, config)]
    best = min(results, key=lambda r: r.j)
    js = [r.j for r in results]
    out = {"params": params.to_dict(), "result": best.to_dict(),
           "starts": [{"seed": r.seed, "j": r.j, "residual": r.residual, "converged": r.converged}
                      for r in results],
           "multistart_spread": (max(js) - min(js)) / best.j}
    em.json(out)
    em.csv(("r", "u"), _profile_rows(best.field))
    return EXIT_OK if all(r.converged for r in results) else EXIT_FAILED


def cmd_minimize_sector(ns, em: Emitter) -> int:
    params = _params(ns)
    _require(ns, "t")
    config = _solver_config(ns)
    code = EXIT_OK
    note = None
    try:
        res = minimize_sector(params, ns.t, config)
    except ModeTruncationError as exc:
        res, code, note = exc.result, EXIT_FAILED, str(exc)
    if not res.converged:
        code = EXIT_FAILED
    em.json({"params": params.to_dict(), "t": ns.t, "result": res.to_dict(), "truncation_error": note})
    f = res.field
    rows = [(r, l, c, sn) for l, cr, sr in zip(f.modes, f.coeffs, f.sin_coeffs)
            for r, c, sn in zip(f.grid.nodes, cr, sr)]
    em.csv(("r", "mode", "cos", "sin"), rows)
    return code


def cmd_sweep(ns, em: Emitter) -> int:
    params = _params(ns)
    config = _solver_config(ns)
    if ns.lambdas:
        lambdas = ns.lambdas
    else:
        _require(ns, "lambda_min", "lambda_max")
        lambdas = list(np.linspace(ns.lambda_min, ns.lambda_max, ns.lambda_steps or 14))
    pairs = [eigenpair_degree(params.k, l) for l in (ns.mode or (1, 2, 3))]
    res = lambda_sweep(params, lambdas, pairs, config, tolerance=ns.tolerance or 1e-4,
                       lambda_tol=ns.lambda_tol or 1e-2)
    tol_rel = ns.tolerance or 1e-4
    em.csv(("lambda", "ell", "mu", "Q_u", "Q_tilde", "margin", "relative_margin", "tolerance",
            "verdict", "J", "el_residual"),
           [(r.lam, r.ell, r.mu, r.q_u, r.q_tilde, r.margin, r.relative_margin, tol_rel, r.verdict,
             r.j, r.residual) for r in res.rows])
    em.json({"params": params.to_dict(), "sweep": res.to_dict(), "config": config.to_dict()})
    ok = res.within_bound is not False and res.stable_at_nonpositive
    return EXIT_OK if ok else EXIT_FAILED


def cmd_sector_compare(ns, em: Emitter) -> int:
    params = _params(ns)
    _require(ns, "t", "h")
    cmp = sector_compare(params, ns.t, ns.h, _solver_config(ns))
    em.json({"params": params.to_dict(), "comparison": cmp.to_dict()})
    em.csv(("quantity", "value"), [("j_t", cmp.j_t), ("j_vt", cmp.j_vt), ("j_T", cmp.j_big_t),
                                   ("minimality_margin", cmp.minimality_margin),
                                   ("strict_margin", cmp.strict_margin),
                                   ("error_estimate", cmp.error_estimate)])
    return EXIT_OK if (cmp.minimal_ok and cmp.strict_ok) else EXIT_FAILED


COMMANDS = {
    "constants": cmd_constants, "check": cmd_check, "minimize-radial": cmd_minimize_radial,
    "minimize-sector": cmd_minimize_sector, "sweep": cmd_sweep, "sector-compare": cmd_sector_compare,
}


def _expand_config(argv: List[str]) -> List[str]:
    """Insert options read from ``--config FILE`` before the command line flags."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    rest = list(argv)
    path = None
    for i, a in enumerate(rest):
        if a == "--config":
            if i + 1 >= len(rest):
                raise UsageError("--config needs a file path")
            path = rest[i + 1]
            del rest[i:i + 2]
            break
        if a.startswith("--config="):
            path = a.split("=", 1)[1]
            del rest[i]
            break
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path!r}: {exc.strerror}")
    given = rest[0] if rest and rest[0] in SUBCOMMANDS else None
    cfg = RunConfig.from_text(text, given)
    if given is not None and cfg.subcommand != given:
        raise UsageError(f"--config: file is for {cfg.subcommand!r}, not {given!r}")
    tail = rest[1:] if given is not None else rest
    return [cfg.subcommand] + cfg.to_argv() + tail


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _expand_config(argv)
        ns = parser.parse_args(argv)
        if ns.subcommand is None:
            raise UsageError(f"choose a subcommand from {{{', '.join(SUBCOMMANDS)}}}")
        em = Emitter(ns.subcommand, ns.out)
        sub_parser = parser._subparsers._group_actions[0].choices[ns.subcommand]
        code = COMMANDS[ns.subcommand](ns, em)
        if ns.out is not None:
            cfg = RunConfig(ns.subcommand, _options_from_namespace(ns, sub_parser))
            em.files["config.txt"] = cfg.to_text()
        em.flush(stdout)
        return code
    except UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NotConverged as exc:
        stderr.write(f"not converged: {exc}\n")
        return EXIT_FAILED
    except CKNError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
