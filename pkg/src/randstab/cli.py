"""Command-line entry point: ``randstab {verify,identify,sample,mc,suite}``.

Exit codes: 0 pass, 2 fail, 1 usage or domain error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .discrete import DiscretePgf, extract_pmf, parse_discrete
from .identify import identify
from .sampling import (
    DEFAULT_SEED,
    RandomSource,
    sample_compounder,
    sample_discrete,
    sample_lt,
    sample_random_sum,
    sample_symmetric_cf,
)
from .stability import solve_scale, verify
from .stats import ks_verdict, tv_verdict
from .suite import SUITES, format_table, run_suite
from .transforms import CfFamily, DomainError, LtFamily, PgfFamily, parse_descriptor

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
SEED_ENV = "RANDSTAB_SEED"
MC_PMF_NMAX = 1024
_DISCRETE_TAGS = ("dstable", "dml", "dlinnik", "dgensml")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _number(text) -> float:
    try:
        return float(Fraction(str(text).strip()))
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"not a number: {text!r}") from None


def _seed(text) -> int:
    try:
        v = int(str(text), 0)
    except ValueError:
        raise DomainError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise DomainError(f"seed must fit in 64 bits, got {text!r}")
    return v


def _sweep(text) -> list[float]:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise DomainError(f"malformed sweep {text!r}; expected lo:hi:n")
    lo, hi = _number(parts[0]), _number(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise DomainError(f"malformed sweep {text!r}; expected lo:hi:n") from None
    if n < 1:
        raise DomainError(f"empty sweep {text!r}")
    return np.linspace(lo, hi, n).tolist()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="randstab", description="Random-sum stability toolkit.")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults; flags win")
    common.add_argument("--seed", help="master seed (default 0xC0FFEE or $RANDSTAB_SEED)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "bin"))

    model = _Parser(add_help=False)
    model.add_argument("--compounder", help="PGF descriptor, e.g. harris:a=3,k=2")
    model.add_argument("--transform", help="LT or CF descriptor, e.g. gamma:beta=0.5")
    model.add_argument("--discrete", help="discrete PGF descriptor, e.g. dml:alpha=0.5,lambda=1")
    model.add_argument("--c", help="scale, e.g. 0.5 or 1/3")
    model.add_argument("--c-sweep", dest="c_sweep", help="lo:hi:n")

    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    v = sub.add_parser("verify", parents=[common, model], help="check a stability equation")
    v.add_argument("--grid", help="lo:hi:n or kind:lo:hi:n")
    v.add_argument("--tol", help="pass threshold on the max residual")

    i = sub.add_parser("identify", parents=[common, model], help="identify the compounder")
    i.add_argument("--n-max", dest="n_max", help="number of pmf coefficients")

    s = sub.add_parser("sample", parents=[common, model], help="draw a sample batch")
    s.add_argument("--samples", help="batch size")
    s.add_argument("--stream", help="stream index")

    m = sub.add_parser("mc", parents=[common, model], help="Monte Carlo check of c S_N ~ X")
    m.add_argument("--n", dest="n_family", help="compounder descriptor (alias of --compounder)")
    m.add_argument("--x", dest="x_family", help="transform descriptor (alias of --transform)")
    m.add_argument("--samples", help="batch size")

    t = sub.add_parser("suite", parents=[common], help="run a regression suite")
    t.add_argument("name", nargs="?", help="suite name", choices=sorted(SUITES))
    return p


_DEFAULTS = {"format": "json", "tol": 1e-12, "samples": 100_000, "stream": 0, "n_max": 64,
             "name": "paper"}


def _merge(args) -> dict:
    opts = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(cfg, dict):
            raise DomainError("config file must hold a JSON object")
        opts.update({k.replace("-", "_"): v for k, v in cfg.items()})
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    for k, v in _DEFAULTS.items():
        opts.setdefault(k, v)
    if "seed" not in opts:
        opts["seed"] = os.environ.get(SEED_ENV) or DEFAULT_SEED
    opts["seed"] = _seed(opts["seed"])
    return opts


def _scales(o) -> list[float] | None:
    if o.get("c") is not None and o.get("c_sweep") is not None:
        raise UsageError("give --c or --c-sweep, not both")
    if o.get("c_sweep") is not None:
        return _sweep(o["c_sweep"])
    if o.get("c") is not None:
        return [_number(o["c"])]
    return None


def _model(o, need_compounder: bool):
    P = None
    if o.get("compounder"):
        P = parse_descriptor(o["compounder"], PgfFamily)
    elif need_compounder:
        raise UsageError("--compounder is required")
    if o.get("transform") and o.get("discrete"):
        raise UsageError("give --transform or --discrete, not both")
    if o.get("discrete"):
        X = parse_discrete(o["discrete"])
    elif o.get("transform"):
        X = parse_descriptor(o["transform"], (LtFamily, CfFamily))
    else:
        X = None
    return P, X


def _emit(o, text: str | bytes):
    out = o.get("out")
    if out:
        mode = "wb" if isinstance(text, bytes) else "w"
        with open(out, mode) as fh:
            fh.write(text)
    elif isinstance(text, bytes):
        sys.stdout.buffer.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(o) -> int:
    P, X = _model(o, need_compounder=True)
    if X is None:
        raise UsageError("--transform or --discrete is required")
    tol = _number(o["tol"])
    cs = _scales(o)
    if cs is None:
        sol = solve_scale(P, X, grid=o.get("grid"), tol=tol)
        rep = sol.report
        if o["format"] == "csv":
            _emit(o, rep.to_csv())
        else:
            _emit(o, _dump({"scale": sol.to_dict(), **rep.to_dict()}))
        return EXIT_PASS if sol.stable else EXIT_FAIL
    reps = [verify(P, X, c, o.get("grid"), tol) for c in cs]
    if o["format"] == "csv":
        _emit(o, "".join(r.to_csv() for r in reps))
    else:
        body = reps[0].to_dict() if len(reps) == 1 else [r.to_dict() for r in reps]
        _emit(o, _dump(body))
    return EXIT_PASS if all(r.passed for r in reps) else EXIT_FAIL


def cmd_identify(o) -> int:
    _, X = _model(o, need_compounder=False)
    if X is None:
        raise UsageError("--transform or --discrete is required")
    if isinstance(X, CfFamily):
        raise DomainError("identification needs a Laplace transform or a discrete PGF")
    cs = _scales(o)
    if cs is None:
        raise UsageError("--c or --c-sweep is required")
    n_max = int(o["n_max"])
    results = [identify(X, c, n_max=n_max) for c in cs]
    if o["format"] == "csv":
        _emit(o, "".join(r.curve_csv() for r in results))
    else:
        body = results[0].to_dict() if len(results) == 1 else [r.to_dict() for r in results]
        _emit(o, _dump(body))
    return EXIT_PASS if all(r.verdict == "valid-pgf" for r in results) else EXIT_FAIL


def _sample_any(obj, n, src):
    if isinstance(obj, DiscretePgf):
        return sample_discrete(obj, n, src)
    if isinstance(obj, LtFamily):
        return sample_lt(obj, n, src)
    if isinstance(obj, CfFamily):
        return sample_symmetric_cf(obj, n, src)
    return sample_compounder(obj, n, src)


def cmd_sample(o) -> int:
    P, X = _model(o, need_compounder=False)
    target = X if X is not None else P
    if target is None:
        raise UsageError("one of --transform, --discrete or --compounder is required")
    if X is not None and P is not None:
        raise UsageError("sample one family at a time")
    n = int(_number(o["samples"]))
    batch = _sample_any(target, n, RandomSource(o["seed"], int(o["stream"])))
    fmt = o["format"]
    if fmt == "bin":
        _emit(o, batch.to_binary())
    elif fmt == "csv":
        _emit(o, batch.to_csv())
    else:
        _emit(o, _dump({"family": batch.family, "n": batch.n, "seed": batch.seed,
                        "stream": batch.stream, "discrete": batch.discrete,
                        "values": batch.values.tolist()}))
    return EXIT_PASS


def cmd_mc(o) -> int:
    if o.get("n_family"):
        o["compounder"] = o["n_family"]
    if o.get("x_family"):
        if o.get("discrete") or o.get("transform"):
            raise UsageError("--x duplicates --transform/--discrete")
        text = o["x_family"]
        tag = text.partition(":")[0].strip().lower()
        o["discrete" if tag in _DISCRETE_TAGS else "transform"] = text
    P, X = _model(o, need_compounder=True)
    if X is None:
        raise UsageError("--x, --transform or --discrete is required")
    cs = _scales(o)
    if cs is None or len(cs) != 1:
        raise UsageError("mc needs a single --c")
    c = cs[0]
    n = int(_number(o["samples"]))
    src = RandomSource(o["seed"], 0)
    summed = sample_random_sum(P, X, c, n, src.child(0))
    if isinstance(X, DiscretePgf):
        verdict = tv_verdict(summed, extract_pmf(X, MC_PMF_NMAX))
    else:
        verdict = ks_verdict(summed, _sample_any(X, n, src.child(1)))
    body = {"compounder": P.descriptor(), "x": X.descriptor(), "c": c,
            **verdict.to_dict(), "zero_count": summed.meta["zero_count"]}
    _emit(o, _dump(body))
    return EXIT_PASS if verdict.passed else EXIT_FAIL


def cmd_suite(o) -> int:
    rows = run_suite(o["name"])
    if o["format"] == "json":
        table = format_table(rows)
        print(table)
        if o.get("out"):
            _emit(o, _dump([r.to_dict() for r in rows]))
    else:
        _emit(o, format_table(rows))
    return EXIT_PASS if all(r.passed for r in rows) else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "identify": cmd_identify, "sample": cmd_sample,
            "mc": cmd_mc, "suite": cmd_suite}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        o = _merge(args)
        if o["format"] == "bin" and args.command != "sample":
            raise UsageError("--format bin applies to sample only")
        return COMMANDS[args.command](o)
    except UsageError as exc:
        print(f"randstab: usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except DomainError as exc:
        print(f"randstab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
