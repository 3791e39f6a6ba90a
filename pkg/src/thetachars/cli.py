"""Command-line entry point: characters, lie, dims and verify."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

from . import pipeline
from .arith import DEFAULT_TERMS, QExp, fmt_rational
from .checks import SUITES, run_suite
from .lie import lie_characters
from .models import MODELS, ModelNotSupported, ModelSpec, get_model
from .theta import numeric_transform_check

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    model: str | None
    terms: int | None = DEFAULT_TERMS  # None: each verify suite uses its own
    fmt: str = "json"
    suite: str = "algebraic"
    threads: int = 1
    numeric: bool = False
    tau0: complex = 1j

    def __post_init__(self):
        if self.terms is not None and self.terms < 1:
            raise ValueError("--terms must be at least 1")
        if self.threads < 1:
            raise ValueError("--threads must be at least 1")
        if self.model is not None and self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.tau0.imag <= 0:
            raise ValueError("--tau0 must lie in the upper half plane")


def character_document(model: ModelSpec, characters: dict, kappa, c=None, source: str = "theta") -> dict:
    rows = []
    for h in sorted(characters):
        ch: QExp = characters[h]
        rows.append({
            "h": fmt_rational(h),
            "offset": fmt_rational(ch.offset),
            "coefficients": [fmt_rational(x) for x in ch.coeffs],
        })
    return {
        "model": model.name,
        "label": model.label,
        "source": source,
        "c": fmt_rational(model.c if c is None else c),
        "c_tilde": fmt_rational(model.c_tilde),
        "l": model.l,
        "k": model.k,
        "delta": fmt_rational(model.delta),
        "kappa": fmt_rational(kappa),
        "characters": rows,
    }


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=1)
    lines = [f"{doc['model']}  {doc['label']}  c={doc['c']}  l={doc['l']}  k={doc['k']}  "
             f"delta={doc['delta']}  kappa={doc['kappa']}  [{doc['source']}]"]
    rows = doc["characters"]
    wh = max(len(r["h"]) for r in rows)
    wo = max(len(r["offset"]) for r in rows)
    for r in rows:
        lines.append(f"h={r['h']:>{wh}}  q^{r['offset']:<{wo}}  " + " ".join(r["coefficients"]))
    if "s_residual" in doc:
        lines.append(f"S residual at tau0: {doc['s_residual']}")
    return "\n".join(lines)


def cmd_characters(cfg: RunConfig) -> tuple[str, int]:
    model = get_model(cfg.model)
    cs = pipeline.characters(model, cfg.terms, cfg.threads)
    doc = character_document(model, cs.characters, cs.kappa)
    if cfg.numeric:
        solved = pipeline.solve(model, cfg.terms, cfg.threads)
        res = numeric_transform_check(solved.theta, pipeline.rho(model.l), cfg.tau0, cfg.terms)
        doc["s_residual"] = f"{res:.3e}"
    return render(doc, cfg.fmt), EXIT_OK


def cmd_lie(cfg: RunConfig) -> tuple[str, int]:
    model = get_model(cfg.model)
    res = lie_characters(model, cfg.terms)
    doc = character_document(model, res.characters, 1, res.c, res.source)
    return render(doc, cfg.fmt), EXIT_OK


def cmd_dims(cfg: RunConfig) -> tuple[str, int]:
    models = [get_model(cfg.model)] if cfg.model else list(MODELS.values())
    rows = []
    for m in models:
        _, r = pipeline.theta_basis(m, pipeline.RANK_TERMS, cfg.threads)
        rows.append({"model": m.name, "l": m.l, "k": m.k, "rank": r, "table": m.dim_table})
    if cfg.fmt == "json":
        return json.dumps({"dims": rows}, sort_keys=True, indent=1), EXIT_OK
    return "\n".join(f"{r['model']:<4} l={r['l']:<3} k={r['k']:<3} rank={r['rank']}" for r in rows), EXIT_OK


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    models = [cfg.model] if cfg.model else None
    suites = SUITES if cfg.suite == "all" else (cfg.suite,)
    checks = []
    for s in suites:
        checks += run_suite(s, models, cfg.terms, cfg.tau0, cfg.threads)
    failed = sum(not c.passed for c in checks)
    if cfg.fmt == "json":
        doc = {"checks": [c.__dict__ for c in checks], "failed": failed}
        text = json.dumps(doc, sort_keys=True, indent=1)
    else:
        text = "\n".join(c.line() for c in checks) + f"\n{len(checks) - failed}/{len(checks)} checks passed"
    return text, EXIT_FAILED if failed else EXIT_OK


COMMANDS = {"characters": cmd_characters, "lie": cmd_lie, "dims": cmd_dims, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thetachars",
                                     description="Conformal characters from quaternionic theta series.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model_required, terms=DEFAULT_TERMS):
        p.add_argument("--model", choices=list(MODELS), required=model_required)
        p.add_argument("--terms", type=int, default=terms, help="number of q-coefficients (default %(default)s)")
        p.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("characters", help="characters from the theta construction")
    common(p, True)
    p.add_argument("--numeric", action="store_true", help="also report the S-transformation residual")
    p.add_argument("--tau0", type=float, nargs=2, default=(0.0, 1.0), metavar=("RE", "IM"))

    p = sub.add_parser("lie", help="characters from the Lie-theoretic formulas")
    common(p, True)

    p = sub.add_parser("dims", help="ranks of the theta families")
    common(p, False)

    p = sub.add_parser("verify", help="run a verification suite")
    common(p, False, terms=None)
    p.add_argument("--suite", choices=SUITES + ("all",), default="algebraic")
    p.add_argument("--tau0", type=float, nargs=2, default=(0.0, 1.0), metavar=("RE", "IM"))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    tau0 = getattr(args, "tau0", (0.0, 1.0))
    return RunConfig(
        model=args.model,
        terms=args.terms,
        fmt=args.fmt,
        suite=getattr(args, "suite", "algebraic"),
        threads=args.threads,
        numeric=getattr(args, "numeric", False),
        tau0=complex(*tau0),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        text, code = COMMANDS[args.command](cfg)
    except ModelNotSupported as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, LookupError, ValueError) as exc:
        print(f"error: {args.command} --model {cfg.model}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
