"""Command line front end: ``copson <command> -f problem.toml``.

Exit codes: 0 success, 1 input error, 2 mathematical negative (weights not
admissible, embedding fails, a checked invariant fails).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import associated, conditions, discretization, oracle
from . import weights as W
from .config import DEFAULT_BUDGET, DEFAULT_DEPTH, DEFAULT_GRID, GridConfig, OptimizerBudget
from .errors import CopsonError, NotAdmissible, WeightParseError
from .fundamental import FundamentalFunction
from .stepfunction import StepFunction, parse_step

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class ProblemSpec:
    u: str
    v: str
    m: float
    p: float
    w: str | None = None
    q: float | None = None
    g: str | None = None
    t: list = field(default_factory=list)
    grid: GridConfig = DEFAULT_GRID
    budget: OptimizerBudget = DEFAULT_BUDGET
    depth: int = DEFAULT_DEPTH

    def weights(self):
        u, v = W.parse_weight(self.u), W.parse_weight(self.v)
        w = W.parse_weight(self.w) if self.w is not None else None
        return u, v, w

    def step(self) -> StepFunction:
        if self.g is None:
            raise InputError("this command needs a step function g")
        return parse_step(self.g)

    def to_dict(self):
        d = asdict(self)
        d["grid"] = self.grid.to_dict()
        d["budget"] = self.budget.to_dict()
        return d


_OPTION_KEYS = {
    "grid_lo": ("grid", "lo", int), "grid_hi": ("grid", "hi", int),
    "per_octave": ("grid", "per_octave", int), "tol": ("grid", "tol", float),
    "candidates": ("budget", "candidates", int), "local_steps": ("budget", "local_steps", int),
    "seed": ("budget", "seed", int), "knot_count": ("budget", "knot_count", int),
}


def load_spec(path, overrides=None) -> ProblemSpec:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return spec_from_dict(data, overrides)


def spec_from_dict(data: dict, overrides=None) -> ProblemSpec:
    data = dict(data)
    opts = dict(data.pop("options", {}))
    opts.update({k: v for k, v in (overrides or {}).items() if v is not None})
    for key in ("u", "v", "m", "p"):
        if key not in data:
            raise InputError(f"missing required key {key!r}")
    known = {"u", "v", "w", "m", "p", "q", "g", "t"}
    extra = set(data) - known
    if extra:
        raise InputError(f"unknown keys: {sorted(extra)}")
    try:
        spec = ProblemSpec(u=str(data["u"]), v=str(data["v"]), m=float(data["m"]),
                           p=float(data["p"]), w=data.get("w"),
                           q=float(data["q"]) if "q" in data else None,
                           g=data.get("g"), t=[float(x) for x in data.get("t", [])])
        grid, budget = {}, {}
        depth = DEFAULT_DEPTH
        for key, val in opts.items():
            if key == "depth":
                depth = int(val)
                continue
            if key not in _OPTION_KEYS:
                raise InputError(f"unknown option {key!r}")
            target, name, cast = _OPTION_KEYS[key]
            (grid if target == "grid" else budget)[name] = cast(val)
        spec = replace(spec, grid=replace(DEFAULT_GRID, **grid),
                       budget=replace(DEFAULT_BUDGET, **budget), depth=depth)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    for name in ("m", "p", "q"):
        val = getattr(spec, name)
        if val is not None and not (val > 0 and math.isfinite(val)):
            raise InputError(f"{name} must be a positive real")
    if spec.depth < 1:
        raise InputError("depth must be positive")
    spec.weights()  # raises WeightParseError on bad grammar
    if spec.g is not None:
        spec.step()
    return spec


def _enc(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    if isinstance(x, dict):
        return {k: _enc(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    if isinstance(x, np.floating):
        return _enc(float(x))
    return x


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report dict)


def _ff(spec):
    u, v, _ = spec.weights()
    return FundamentalFunction(u, v, spec.m, spec.p, tol=spec.grid.tol)


def cmd_admissible(spec: ProblemSpec, args):
    adm = _ff(spec).is_admissible()
    rep = {"admissible": adm.ok, "status": adm.status, "witness": adm.witness}
    return (EXIT_OK if adm.ok else EXIT_NEGATIVE), rep


def cmd_phi(spec: ProblemSpec, args):
    ff = _ff(spec)
    adm = ff.is_admissible()
    t = np.asarray(spec.t or [2.0 ** k for k in range(-spec.depth, spec.depth + 1)])
    phi_p = ff.phi_p(t)
    rep = {"admissible": adm.ok, "t": t.tolist(), "phi": np.power(phi_p, 1 / spec.p).tolist(),
           "phi_p": phi_p.tolist(), "phi_prime": [], "phi_p_infinity": ff.phi_p_infinity()}
    for x in t:
        try:
            rep["phi_prime"].append(float(ff.phi_prime(x)))
        except CopsonError:
            rep["phi_prime"].append(None)
    return (EXIT_OK if adm.ok else EXIT_NEGATIVE), rep


def cmd_discretize(spec: ProblemSpec, args):
    u, v, _ = spec.weights()
    ff = _ff(spec)
    seq = discretization.build_sequence(u, v, spec.m, spec.p, spec.depth, ff=ff)
    res = discretization.verify_sequence(seq, u, v, spec.m, spec.p, ff=ff)
    res.pop("per_k")
    rep = seq.to_dict()
    rep["residuals"] = res
    return EXIT_OK, rep


def _need_w(spec):
    if spec.w is None or spec.q is None:
        raise InputError("this command needs w and q")


def cmd_embed(spec: ProblemSpec, args):
    _need_w(spec)
    u, v, w = spec.weights()
    report = conditions.embedding_constant(u, v, w, spec.m, spec.p, spec.q, spec.grid)
    rep = report.to_dict()
    if args.oracle:
        res = oracle.empirical_embedding_constant(u, v, w, spec.m, spec.p, spec.q,
                                                  spec.budget, spec.grid)
        rep["oracle"] = res.to_dict()
        C = report.C_estimate
        rep["oracle"]["ratio"] = C / res.C_emp if res.C_emp > 0 else math.inf
    return (EXIT_OK if report.embedding_holds else EXIT_NEGATIVE), rep


def cmd_assoc(spec: ProblemSpec, args):
    u, v, _ = spec.weights()
    g = spec.step()
    rep = associated.associated_report(u, v, spec.m, spec.p, g, spec.grid).to_dict()
    return EXIT_OK, rep


def cmd_verify(spec: ProblemSpec, args):
    """Run the invariant checks that apply to this problem."""
    from . import verify
    checks = verify.run_checks(spec, oracle_checks=args.oracle)
    ok = all(c["passed"] for c in checks)
    return (EXIT_OK if ok else EXIT_NEGATIVE), {"passed": ok, "checks": checks}


COMMANDS = {
    "admissible": cmd_admissible,
    "phi": cmd_phi,
    "discretize": cmd_discretize,
    "embed": cmd_embed,
    "assoc": cmd_assoc,
    "verify": cmd_verify,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="copson", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("-f", "--file", required=True, help="problem file (TOML)")
    ap.add_argument("--json", action="store_true", help="compact single-line JSON output")
    ap.add_argument("--oracle", action="store_true", help="add the brute-force optimiser")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--depth", type=int)
    ap.add_argument("--tol", type=float)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = {"command": args.command}
    try:
        spec = load_spec(args.file, {"seed": args.seed, "depth": args.depth, "tol": args.tol})
        out["problem"] = spec.to_dict()
        code, rep = COMMANDS[args.command](spec, args)
        out.update(rep)
    except (InputError, WeightParseError, ValueError) as exc:
        code = EXIT_INPUT
        out["error"] = f"{type(exc).__name__}: {exc}"
    except NotAdmissible as exc:
        code = EXIT_NEGATIVE
        out.update({"admissible": False, "status": exc.status, "witness": exc.witness,
                    "error": str(exc)})
    except CopsonError as exc:
        code = EXIT_NEGATIVE
        out["error"] = f"{type(exc).__name__}: {exc}"
    out["exit_code"] = code
    text = json.dumps(_enc(out), separators=(",", ":") if args.json else None,
                      indent=None if args.json else 2)
    print(text)
    if "error" in out:
        print(out["error"], file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
