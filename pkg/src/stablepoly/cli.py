"""Command-line front end.

Polynomials are given inline in the text grammar (``"x1*(x1+3) + x2"``) or
as a path to a file holding either that grammar or MultiPoly JSON.

Exit codes: 0 a verdict was produced, 1 a registered fact was refuted,
2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import construct as C
from .factcheck import FACT_SUITES, REGISTRY, CorpusError, corpus_save, probe_question, run_suite
from .interlace import Relation, check_relation
from .polycore import MultiPoly, PolySyntaxError, UniPoly, format_text, parse_text
from .stability import SamplerConfig, decide, decide_upper, in_hstable_real, in_ppos
from .uniroots import RootFindingError

EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
SEED_ENV = "STABLEPOLY_SEED"
CHECK_CLASSES = {"stable": decide, "upper": decide_upper, "ppos": in_ppos, "real": in_hstable_real}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    seed: int = 0
    trials: int = 1000
    tol: float = 1e-9
    format: str = "text"
    corpus: Path | None = None
    timing: bool = False
    trials_given: bool = False

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(trials=self.trials, seed=self.seed, tol=self.tol)


def _config(args: argparse.Namespace) -> CliConfig:
    seed = args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be positive")
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    return CliConfig(
        seed=seed,
        trials=args.trials if args.trials is not None else 1000,
        tol=args.tol,
        format=args.format,
        corpus=Path(args.corpus) if args.corpus else None,
        timing=args.timing,
        trials_given=args.trials is not None,
    )


def read_poly(arg: str, nvars: int | None = None) -> MultiPoly:
    """Inline text, or a file containing text or MultiPoly JSON."""
    path = Path(arg)
    text = arg
    try:
        is_file = path.is_file()
    except OSError:
        is_file = False
    if is_file:
        text = path.read_text().strip()
        if text.startswith("{"):
            try:
                return MultiPoly.from_json(json.loads(text))
            except (json.JSONDecodeError, ValueError) as e:
                raise UsageError(f"{arg}: {e}") from None
    try:
        return parse_text(text, nvars)
    except PolySyntaxError as e:
        raise UsageError(f"cannot parse {arg!r}: {e}") from None


def _same_space(f: MultiPoly, g: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    n = max(f.nvars, g.nvars, 1)
    return _pad(f, n), _pad(g, n)


def _pad(p: MultiPoly, n: int) -> MultiPoly:
    return p.extend(n - p.nvars) if p.nvars < n else p


def _univariate(p: MultiPoly, name: str) -> UniPoly:
    if p.nvars > 1 and any(any(e[1:]) for e in p.terms):
        raise UsageError(f"{name} must be univariate in x1")
    return UniPoly.from_multi(_pad(p, 1) if p.nvars == 0 else MultiPoly(1, {e[:1]: c for e, c in p.terms.items()}))


# -- subcommands ------------------------------------------------------------------------


def cmd_check(args, cfg: CliConfig):
    f = read_poly(args.poly)
    v = CHECK_CLASSES[args.cls](f, cfg.sampler())
    out = {"command": "check", "poly": f.to_json(), "class": args.cls, "verdict": v.to_json()}
    text = f"{format_text(f)}: {v.to_json()['verdict']}"
    if v.to_json().get("witness"):
        text += " at " + ", ".join(f"{complex(a, b):.6g}" for a, b in v.to_json()["witness"])
    return out, text, EXIT_OK


def cmd_interlace(args, cfg: CliConfig):
    f, g = _same_space(read_poly(args.f), read_poly(args.g))
    try:
        rel = Relation(args.relation)
    except ValueError:
        raise UsageError(f"unknown relation {args.relation!r}; choose from {[r.value for r in Relation]}") from None
    v = check_relation(f, g, rel, cfg.sampler())
    out = {"command": "interlace", "relation": rel.value, "f": f.to_json(), "g": g.to_json(), "result": v.to_json()}
    return out, f"{rel.value}: {v.holds} ({v.method}) {v.detail}".rstrip(), EXIT_OK


def cmd_construct(args, cfg: CliConfig):
    if args.recipe == "pencil-spec":
        if args.spec is None:
            raise UsageError("construct pencil-spec needs --spec FILE")
        try:
            spec = C.PencilSpec.from_json(json.loads(Path(args.spec).read_text()))
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as e:
            raise UsageError(f"bad pencil spec: {e}") from None
        cert = C.det_pencil(spec)
    else:
        cert = C.random_stable(args.nvars, args.degree, seed=cfg.seed, recipe=args.recipe, real=args.real)
    out = {"command": "construct", "poly": cert.poly.to_json(), "text": format_text(cert.poly), "kind": cert.kind}
    return out, f"{format_text(cert.poly)}  [{cert.kind}]", EXIT_OK


def cmd_hadamard(args, cfg: CliConfig):
    f = read_poly(args.f)
    g = read_poly(args.g)
    h = C.hadamard(_univariate(f, "f"), g, args.var - 1)
    return {"command": "hadamard", "poly": h.to_json(), "text": format_text(h)}, format_text(h), EXIT_OK


def cmd_bezout(args, cfg: CliConfig):
    f, g = _univariate(read_poly(args.f), "f"), _univariate(read_poly(args.g), "g")
    b = C.bezout(f, g)
    return {"command": "bezout", "poly": b.to_json(), "text": format_text(b)}, format_text(b), EXIT_OK


def _reports_out(command: str, reports, cfg: CliConfig):
    if cfg.corpus is not None:
        cfg.corpus.mkdir(parents=True, exist_ok=True)
        for r in reports:
            corpus_save(r, cfg.corpus / f"{r.suite}-seed{r.seed}.json")
    ok = all(r.ok for r in reports)
    out = {"command": command, "seed": cfg.seed, "ok": ok, "reports": [r.to_json(timing=cfg.timing) for r in reports]}
    lines = []
    for r in reports:
        status = "PROBE" if r.probe else ("ok" if r.ok else "REFUTED")
        line = f"{r.suite:22s} {status:8s} trials={r.trials} passes={r.passes} skips={r.skips} refutations={len(r.refutations)}"
        if cfg.timing and r.ms is not None:
            line += f" {r.ms / 1000:.2f}s"
        lines.append(line)
        for ref in r.refutations[:3]:
            lines.append(f"    trial {ref['trial']}: {ref['reason']}")
    return out, "\n".join(lines), EXIT_OK if ok else EXIT_REFUTED


def cmd_verify(args, cfg: CliConfig):
    if args.suite == "all":
        ids = FACT_SUITES
    elif args.suite in REGISTRY:
        ids = [args.suite]
    else:
        raise UsageError(f"unknown suite {args.suite!r}")
    trials = cfg.trials if cfg.trials_given else None
    reports = [run_suite(i, trials=trials, seed=cfg.seed) for i in ids]
    return _reports_out("verify", reports, cfg)


def cmd_probe(args, cfg: CliConfig):
    report = probe_question(args.question, args.budget, cfg.seed)
    return _reports_out("probe", [report], cfg)


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help=f"random seed ({SEED_ENV} overrides)")
    common.add_argument("--trials", type=int, default=None, help="Monte-Carlo restrictions (default 1000); for verify, trials per suite")
    common.add_argument("--tol", type=float, default=1e-9, help="root real-part tolerance")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--corpus", default=None, help="directory receiving suite reports as JSON")
    common.add_argument("--timing", action="store_true", help="include elapsed times in suite output")

    p = argparse.ArgumentParser(prog="stablepoly", description="Stable polynomial checks and constructions.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="decide stability of a polynomial")
    s.add_argument("poly")
    s.add_argument("--class", dest="cls", choices=sorted(CHECK_CLASSES), default="stable")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("interlace", parents=[common], help="check an interlacing relation between f and g")
    s.add_argument("relation", help="H, U, P, Hsim or Psim")
    s.add_argument("f")
    s.add_argument("g")
    s.set_defaults(run=cmd_interlace)

    s = sub.add_parser("construct", parents=[common], help="build a certified stable polynomial")
    s.add_argument("recipe", choices=(*C.RECIPES, "pencil-spec"))
    s.add_argument("--nvars", type=int, default=2)
    s.add_argument("--degree", type=int, default=3)
    s.add_argument("--real", action="store_true")
    s.add_argument("--spec", help="PencilSpec JSON file for pencil-spec")
    s.set_defaults(run=cmd_construct)

    s = sub.add_parser("hadamard", parents=[common], help="coefficientwise product of univariate f with g along one variable")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("--var", type=int, default=1, help="1-based variable of g")
    s.set_defaults(run=cmd_hadamard)

    s = sub.add_parser("bezout", parents=[common], help="Bezoutian (f(x)g(y) - f(y)g(x))/(x - y)")
    s.add_argument("f")
    s.add_argument("g")
    s.set_defaults(run=cmd_bezout)

    s = sub.add_parser("verify", parents=[common], help="run registered fact suites")
    s.add_argument("--suite", required=True, help="suite id or 'all'")
    s.set_defaults(run=cmd_verify)

    s = sub.add_parser("probe", parents=[common], help="run an open-question probe")
    s.add_argument("question", choices=("q1", "q2"))
    s.add_argument("--budget", type=int, default=50)
    s.set_defaults(run=cmd_probe)
    return p


def _emit_error(kind: str, message: str, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps({"error": kind, "message": message}, sort_keys=True), file=sys.stderr)
    else:
        print(f"stablepoly: {kind} error: {message}", file=sys.stderr)


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    fmt = args.format
    try:
        cfg = _config(args)
        out, text, code = args.run(args, cfg)
    except (UsageError, KeyError, IndexError, PolySyntaxError, OSError) as e:
        _emit_error("usage", str(e), fmt)
        return EXIT_USAGE
    except CorpusError as e:
        _emit_error("corpus", str(e), fmt)
        return EXIT_USAGE
    except (RootFindingError, ArithmeticError, np.linalg.LinAlgError, FloatingPointError) as e:
        _emit_error("numerical", str(e) or type(e).__name__, fmt)
        return EXIT_NUMERIC
    except ValueError as e:
        _emit_error("usage", str(e), fmt)
        return EXIT_USAGE
    if fmt == "json":
        print(json.dumps(out, sort_keys=True, indent=1))
    else:
        print(text)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
