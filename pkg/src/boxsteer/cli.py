"""Command-line interface.

    boxsteer steer ENSEMBLES.json      remote-preparation box + proof report
    boxsteer verify BOX.json ENSEMBLES.json
                                       recheck a claimed box/ensembles pair
    boxsteer blind S T [--split FILE]  hidden-constituent ensemble for (s, t)
    boxsteer decompose BOX.json        exact vertex weights for an NS box
    boxsteer check BOX.json            {"ns": bool, "local": bool|null}
    boxsteer simulate ENSEMBLE.json    seeded protocol run + audit
    boxsteer audit LOGS.ndjson ENSEMBLE.json

Results go to stdout as one JSON document, or to individual files under
`--out DIR`.  Rationals are written and read as "num/den" strings, on
the command line included.

Exit codes: 0 success; 2 invalid input (bad file, bad table, bad
weights, incompatible ensembles); 3 target on a diagonal / outside any
solvable region; 4 no exact vertex decomposition exists; 5 the requested
checks ran and failed (verification report, no-signalling check, or
audit).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Any

from . import __version__
from .blind import TargetState, plan_blind_steering
from .errors import (
    BoxWorldError,
    DegenerateRegionWarning,
    InfeasibleError,
    RegionError,
    ValidationError,
)
from .polytope import catalog_hash, decompose, is_local
from .boxes import is_no_signalling
from .serialize import (
    audit_verdict_to_json,
    bipartite_box_from_json,
    bipartite_box_to_json,
    blind_report_to_json,
    dumps,
    ensemble_from_json,
    fraction_from_json,
    input_policy_from_json,
    logs_from_ndjson,
    logs_to_ndjson,
    nonlocal_ensemble_from_json,
    nonlocal_ensemble_to_json,
    simulation_report_to_json,
    verification_report_to_json,
)
from .simulate import DEFAULT_SIGNIFICANCE, InputPolicy, referee_audit, run_protocol
from .steering import SteeringState, construct_steering_state, verify_steering_state

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_REGION = 3
EXIT_INFEASIBLE = 4
EXIT_CHECKS_FAILED = 5


def _load_json(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _emit(out: str | None, documents: dict[str, Any]) -> None:
    """Write one file per document under --out, or a combined JSON
    document (keyed by basename) to stdout."""
    if out is not None:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, doc in documents.items():
            path = outdir / name
            if name.endswith(".ndjson"):
                path.write_text(doc)
            else:
                path.write_text(dumps(doc))
            print(f"wrote {path}")
    else:
        combined = {
            name.rsplit(".", 1)[0]: doc
            for name, doc in documents.items()
            if not name.endswith(".ndjson")
        }
        sys.stdout.write(dumps(combined))


def _ensemble_list(path: str) -> list:
    data = _load_json(path)
    if not isinstance(data, list) or not data:
        raise ValidationError(f"{path} must hold a nonempty JSON list of ensembles")
    return [ensemble_from_json(item) for item in data]


def cmd_steer(args: argparse.Namespace) -> int:
    state = construct_steering_state(_ensemble_list(args.ensembles))
    report = verify_steering_state(state)
    _emit(
        args.out,
        {
            "box.json": bipartite_box_to_json(state.box),
            "report.json": verification_report_to_json(report),
        },
    )
    return EXIT_OK if report.passed else EXIT_CHECKS_FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    box = bipartite_box_from_json(_load_json(args.box))
    ensembles = _ensemble_list(args.ensembles)
    state = SteeringState(box=box, source_ensembles=tuple(ensembles))
    report = verify_steering_state(state)
    _emit(args.out, {"report.json": verification_report_to_json(report)})
    return EXIT_OK if report.passed else EXIT_CHECKS_FAILED


def cmd_blind(args: argparse.Namespace) -> int:
    target = TargetState(fraction_from_json(args.s), fraction_from_json(args.t))
    split = (
        nonlocal_ensemble_from_json(_load_json(args.split)) if args.split else None
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateRegionWarning)
        plan = plan_blind_steering(target, split)
    for item in caught:
        print(f"warning: {item.message}", file=sys.stderr)
    report_doc = blind_report_to_json(plan.report)
    report_doc["degenerate"] = bool(caught)
    _emit(
        args.out,
        {
            "ensemble.json": nonlocal_ensemble_to_json(plan.ensemble),
            "report.json": report_doc,
        },
    )
    return EXIT_OK if plan.report.passed else EXIT_CHECKS_FAILED


def cmd_decompose(args: argparse.Namespace) -> int:
    box = bipartite_box_from_json(_load_json(args.box))
    ensemble = decompose(box)
    _emit(args.out, {"ensemble.json": nonlocal_ensemble_to_json(ensemble)})
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    box = bipartite_box_from_json(_load_json(args.box))
    ns = is_no_signalling(box)
    local = is_local(box) if ns and box.shape == (2, 2, 2, 2) else None
    sys.stdout.write(dumps({"ns": ns, "local": local}))
    return EXIT_OK if ns else EXIT_CHECKS_FAILED


def _parse_policy(value: str) -> InputPolicy:
    if value == "uniform":
        return InputPolicy.uniform()
    if value.lstrip().startswith("{"):
        try:
            obj = json.loads(value)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"inline policy is not valid JSON: {exc}") from exc
        return input_policy_from_json(obj)
    return input_policy_from_json(_load_json(value))


def cmd_simulate(args: argparse.Namespace) -> int:
    ensemble = nonlocal_ensemble_from_json(_load_json(args.ensemble))
    policy = _parse_policy(args.policy)
    report, logs = run_protocol(
        ensemble,
        rounds=args.rounds,
        seed=args.seed,
        policy=policy,
        significance=args.significance,
    )
    documents: dict[str, Any] = {"report.json": simulation_report_to_json(report)}
    if args.out is not None:
        documents["logs.ndjson"] = logs_to_ndjson(logs)
    _emit(args.out, documents)
    return EXIT_OK if report.verdict.passed else EXIT_CHECKS_FAILED


def cmd_audit(args: argparse.Namespace) -> int:
    try:
        text = Path(args.logs).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {args.logs}: {exc}") from exc
    logs = logs_from_ndjson(text)
    ensemble = nonlocal_ensemble_from_json(_load_json(args.ensemble))
    verdict = referee_audit(logs, ensemble, significance=args.significance)
    _emit(args.out, {"verdict.json": audit_verdict_to_json(verdict)})
    return EXIT_OK if verdict.passed else EXIT_CHECKS_FAILED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxsteer",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"boxsteer {__version__} (vertex catalog {catalog_hash()})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steer", help="build the remote-preparation box")
    p.add_argument("ensembles", help="JSON list of ensembles, one per Bob input")
    p.add_argument("--out", help="directory for box.json and report.json")
    p.set_defaults(handler=cmd_steer)

    p = sub.add_parser("verify", help="recheck a claimed box/ensembles pair")
    p.add_argument("box")
    p.add_argument("ensembles")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("blind", help="solve a target for hidden-constituent steering")
    p.add_argument("s", help='p(a=0|x=0) as "num/den"')
    p.add_argument("t", help='p(a=0|x=1) as "num/den"')
    p.add_argument("--split", help="JSON ensemble fixing the free weight split")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_blind)

    p = sub.add_parser("decompose", help="exact vertex decomposition of an NS box")
    p.add_argument("box")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("check", help="no-signalling and locality status of a box")
    p.add_argument("box")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("simulate", help="run the refereed protocol")
    p.add_argument("ensemble")
    p.add_argument("--rounds", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--policy",
        default="uniform",
        help='"uniform", a JSON file path, or an inline JSON object',
    )
    p.add_argument("--significance", type=float, default=DEFAULT_SIGNIFICANCE)
    p.add_argument("--out", help="directory for logs.ndjson and report.json")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("audit", help="audit a log file against an ensemble")
    p.add_argument("logs")
    p.add_argument("ensemble")
    p.add_argument("--significance", type=float, default=DEFAULT_SIGNIFICANCE)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_audit)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except RegionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGION
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BoxWorldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
