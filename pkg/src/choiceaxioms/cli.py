"""Command-line entry point: ``choiceaxioms {audit,verify,trace,profile,table}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .audit import audit, audit_table, dumps_table, table_markdown
from .core import RiskProfile
from .exceptions import GuardError, NotInDomainError, ValidationError
from .report import dumps, make_report, validate_report
from .risk import profile_from_spec
from .rules import ZOO, make_rule
from .trace import trace_decisiveness
from .verify import AXIOMS, search_survivors, verify_corollary, verify_theorem

EXIT_OK, EXIT_VALIDATION, EXIT_GUARD, EXIT_ASSERTION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors; exit code 2 is reserved for guards
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "no_timestamp")}
    return json.loads(json.dumps(cfg))


def _emit(args, command: str, result: dict) -> None:
    report = make_report(command, _config(args), result, timestamp=not args.no_timestamp)
    validate_report(report)
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None


def load_profile_file(path: str) -> RiskProfile:
    """A profile written by ``profile --out`` or a bare ``{universe, values}`` object."""
    data = _load_json(path)
    if "result" in data and data.get("command") == "profile":
        data = data["result"]
    try:
        return RiskProfile.from_json(data)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path} does not hold a risk profile: {exc}") from None


def cmd_audit(args) -> int:
    params = {}
    if args.rule == "weighted_sum":
        if args.weights is None:
            raise ValidationError("weighted_sum needs --weights")
        params["weights"] = args.weights
    elif args.rule == "erm_single":
        params["env_index"] = args.env_index
    elif args.rule == "risk_min" and args.risk is not None:
        params["risk"] = args.risk
    rule = make_rule(args.rule, **params)
    profile = load_profile_file(args.profile_file) if args.profile_file else None
    m = args.universe if args.universe is not None else (profile.m if profile else 3)
    n = args.envs if args.envs is not None else (profile.n if profile else 2)
    if args.rule == "weighted_sum" and len(args.weights) != n:
        raise ValidationError(f"--weights has {len(args.weights)} entries but --envs is {n}")
    if args.rule == "erm_single" and not 1 <= args.env_index <= n:
        raise ValidationError(f"--env-index must be in 1..{n}")
    report = audit(rule, m, n, seed=args.seed, samples=args.samples, include_ties=args.include_ties, profile=profile)
    _emit(args, "audit", report.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    axioms = [a.strip() for a in args.axioms.split(",") if a.strip()]
    kwargs = dict(
        allow_no_po=args.allow_no_po,
        allow_large=args.allow_large,
        omit_triples=args.omit_triples,
        workers=args.workers,
        forward_check=not args.no_forward_check,
        prune=not args.no_prune,
    )
    m, n = args.alternatives, args.environments
    chosen = set(a.lower() for a in axioms)
    if chosen == set(AXIOMS):
        report = verify_theorem(m, n, **kwargs)
    elif chosen == set(AXIOMS) - {"ci"}:
        report = verify_corollary(m, n, **kwargs)
    else:
        report = search_survivors(m, n, axioms, **kwargs)
    _emit(args, "verify", report.to_json(timing=not args.no_timestamp))
    if args.assert_theorem:
        if "ci" in report.axioms:
            failed = n >= 3 and report.survivor_count > 0
        else:
            failed = report.truncated or not report.all_dictatorial
        if failed or not report.claims_hold:
            print("assertion failed: " + json.dumps(report.claims), file=sys.stderr)
            return EXIT_ASSERTION
    return EXIT_OK


def cmd_trace(args) -> int:
    trace = trace_decisiveness(args.environments, dictator=args.dictator, seed=args.seed)
    _emit(args, "trace", trace.to_json())
    return EXIT_OK if trace.valid else EXIT_ASSERTION


def cmd_profile(args) -> int:
    spec = _load_json(args.spec)
    profile = profile_from_spec(spec, args.seed)
    _emit(args, "profile", profile.to_json())
    return EXIT_OK


def cmd_table(args) -> int:
    table = audit_table(tuple(args.environments), m=args.universe, seed=args.seed, samples=args.samples)
    if args.fixture:
        Path(args.fixture).write_text(dumps_table(table) + "\n")
    if args.markdown:
        Path(args.markdown).write_text(table_markdown(table))
    if not args.fixture and not args.markdown:
        sys.stdout.write(table_markdown(table))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="choiceaxioms", description="Axiom audits and impossibility checks for aggregation rules.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--no-timestamp", action="store_true", help="omit wall-clock fields for byte-stable output")

    p = sub.add_parser("audit", help="audit one zoo rule against every axiom")
    p.add_argument("--rule", required=True, choices=sorted(ZOO))
    p.add_argument("--weights", type=_floats)
    p.add_argument("--env-index", type=int, default=1)
    p.add_argument("--risk", type=_floats, help="risk functional for risk_min (default: pooled mean)")
    p.add_argument("--envs", type=int, help="number of environments n")
    p.add_argument("--universe", type=int, help="number of hypotheses m")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--include-ties", action="store_true")
    p.add_argument("--profile-file")
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("verify", help="exhaustive search for rules satisfying an axiom set")
    p.add_argument("--alternatives", type=int, default=3)
    p.add_argument("--environments", type=int, default=3)
    p.add_argument("--axioms", default="ic,po,iih,ir,ci")
    p.add_argument("--assert-theorem", action="store_true")
    p.add_argument("--allow-no-po", action="store_true")
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--omit-triples", action="store_true")
    p.add_argument("--no-forward-check", action="store_true")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trace", help="contract the grand coalition to a single decisive environment")
    p.add_argument("--environments", type=int, required=True)
    p.add_argument("--dictator", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("profile", help="build a risk profile from a generator spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("table", help="regenerate the zoo audit table")
    p.add_argument("--environments", type=_ints, default=[2, 3])
    p.add_argument("--universe", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--fixture")
    p.add_argument("--markdown")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValidationError, NotInDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
