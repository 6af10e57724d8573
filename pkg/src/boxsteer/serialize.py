"""JSON formats for boxes, ensembles, logs, and reports.

Probabilities travel as exact-rational strings ("3/4", "1"); JSON
numbers are rejected on parse so floats can never leak into exact
values.  Bits and indices are plain integers.  Layouts:

  LocalBox        {"X": 2, "A": 2, "table": [["1/2", ...], ...]}
  BipartiteBox    {"X","Y","A","B","table"}; row r = x*Y + y,
                  column c = a*B + b
  Ensemble        {"X","A","members": [{"w": "1/4", "f": [a0, a1, ...]}]}
                  where f lists the deterministic output per input
  NonlocalEnsemble{"products": [{"w","ij": [i,j],"kl": [k,l]}],
                   "prs": [{"w","abd": [alpha,beta,delta]}]}
  RoundLog        one JSON object per line (NDJSON), S boxes as "Sij"

Reports (verification, simulation, audit) serialize one-way to JSON
documents for the CLI; they are outputs, not inputs.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .blind import BlindReport, TargetState
from .boxes import BipartiteBox, LocalBox, PRBox, SBox
from .ensembles import (
    Ensemble,
    NonlocalEnsemble,
    PRMember,
    ProductMember,
)
from .errors import ValidationError
from .reports import VerificationReport
from .simulate import AuditVerdict, InputPolicy, RoundLog, SimulationReport


def fraction_to_json(value: Fraction) -> str:
    return str(Fraction(value))


def fraction_from_json(value: Any) -> Fraction:
    if not isinstance(value, str):
        raise ValidationError(
            f"expected a rational string like \"3/4\", got {value!r}; "
            "JSON numbers are not accepted for probabilities"
        )
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational string {value!r}: {exc}") from exc


def _bit_from_json(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value not in (0, 1):
        raise ValidationError(f"{what} must be the integer 0 or 1, got {value!r}")
    return value


def _index_from_json(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValidationError(f"{what} must be a nonnegative integer, got {value!r}")
    return value


def _field(obj: Any, key: str) -> Any:
    if not isinstance(obj, dict):
        raise ValidationError(f"expected a JSON object, got {type(obj).__name__}")
    if key not in obj:
        raise ValidationError(f"missing field {key!r}")
    return obj[key]


def local_box_to_json(box: LocalBox) -> dict:
    return {
        "X": box.num_inputs,
        "A": box.num_outputs,
        "table": [[fraction_to_json(p) for p in row] for row in box.table],
    }


def local_box_from_json(obj: Any) -> LocalBox:
    num_inputs = _index_from_json(_field(obj, "X"), "X")
    num_outputs = _index_from_json(_field(obj, "A"), "A")
    table = _field(obj, "table")
    if not isinstance(table, list) or len(table) != num_inputs:
        raise ValidationError(f"table must have {num_inputs} rows")
    rows = []
    for row in table:
        if not isinstance(row, list) or len(row) != num_outputs:
            raise ValidationError(f"each table row must have {num_outputs} entries")
        rows.append(tuple(fraction_from_json(p) for p in row))
    return LocalBox(tuple(rows))


def bipartite_box_to_json(box: BipartiteBox) -> dict:
    nx, ny, na, nb = box.shape
    table = [
        [
            fraction_to_json(box.prob(x, y, a, b))
            for a in range(na)
            for b in range(nb)
        ]
        for x in range(nx)
        for y in range(ny)
    ]
    return {"X": nx, "Y": ny, "A": na, "B": nb, "table": table}


def bipartite_box_from_json(obj: Any) -> BipartiteBox:
    nx = _index_from_json(_field(obj, "X"), "X")
    ny = _index_from_json(_field(obj, "Y"), "Y")
    na = _index_from_json(_field(obj, "A"), "A")
    nb = _index_from_json(_field(obj, "B"), "B")
    flat = _field(obj, "table")
    if not isinstance(flat, list) or len(flat) != nx * ny:
        raise ValidationError(f"table must have {nx * ny} rows (x*Y + y order)")
    for row in flat:
        if not isinstance(row, list) or len(row) != na * nb:
            raise ValidationError(f"each row must have {na * nb} entries (a*B + b order)")
    table = tuple(
        tuple(
            tuple(
                tuple(
                    fraction_from_json(flat[x * ny + y][a * nb + b])
                    for b in range(nb)
                )
                for a in range(na)
            )
            for y in range(ny)
        )
        for x in range(nx)
    )
    return BipartiteBox(table)


def ensemble_to_json(ensemble: Ensemble) -> dict:
    members = []
    for weight, box in ensemble.members:
        strategy = [
            next(a for a in range(box.num_outputs) if box.prob(x, a) == 1)
            for x in range(box.num_inputs)
        ]
        members.append({"w": fraction_to_json(weight), "f": strategy})
    return {
        "X": ensemble.num_inputs,
        "A": ensemble.num_outputs,
        "members": members,
    }


def ensemble_from_json(obj: Any) -> Ensemble:
    num_inputs = _index_from_json(_field(obj, "X"), "X")
    num_outputs = _index_from_json(_field(obj, "A"), "A")
    raw = _field(obj, "members")
    if not isinstance(raw, list) or not raw:
        raise ValidationError("members must be a nonempty list")
    members = []
    for item in raw:
        weight = fraction_from_json(_field(item, "w"))
        strategy = _field(item, "f")
        if not isinstance(strategy, list) or len(strategy) != num_inputs:
            raise ValidationError(f"f must list one output per input ({num_inputs})")
        outputs = tuple(_index_from_json(a, "output") for a in strategy)
        if any(a >= num_outputs for a in outputs):
            raise ValidationError(f"output out of range in {outputs}")
        table = tuple(
            tuple(Fraction(1 if a == outputs[x] else 0) for a in range(num_outputs))
            for x in range(num_inputs)
        )
        members.append((weight, LocalBox(table)))
    return Ensemble(tuple(members))


def nonlocal_ensemble_to_json(ensemble: NonlocalEnsemble) -> dict:
    return {
        "products": [
            {
                "w": fraction_to_json(m.weight),
                "ij": [m.alice.alpha, m.alice.beta],
                "kl": [m.bob.alpha, m.bob.beta],
            }
            for m in ensemble.products
        ],
        "prs": [
            {
                "w": fraction_to_json(m.weight),
                "abd": [m.box.alpha, m.box.beta, m.box.delta],
            }
            for m in ensemble.prs
        ],
    }


def nonlocal_ensemble_from_json(obj: Any) -> NonlocalEnsemble:
    raw_products = _field(obj, "products")
    raw_prs = _field(obj, "prs")
    if not isinstance(raw_products, list) or not isinstance(raw_prs, list):
        raise ValidationError("products and prs must be lists")
    products = []
    for item in raw_products:
        weight = fraction_from_json(_field(item, "w"))
        ij = _field(item, "ij")
        kl = _field(item, "kl")
        for pair, name in ((ij, "ij"), (kl, "kl")):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ValidationError(f"{name} must be a two-bit list")
        alice = SBox(_bit_from_json(ij[0], "ij[0]"), _bit_from_json(ij[1], "ij[1]"))
        bob = SBox(_bit_from_json(kl[0], "kl[0]"), _bit_from_json(kl[1], "kl[1]"))
        products.append(ProductMember(weight, alice, bob))
    prs = []
    for item in raw_prs:
        weight = fraction_from_json(_field(item, "w"))
        abd = _field(item, "abd")
        if not isinstance(abd, list) or len(abd) != 3:
            raise ValidationError("abd must be a three-bit list")
        prs.append(
            PRMember(
                weight,
                PRBox(
                    _bit_from_json(abd[0], "abd[0]"),
                    _bit_from_json(abd[1], "abd[1]"),
                    _bit_from_json(abd[2], "abd[2]"),
                ),
            )
        )
    return NonlocalEnsemble(tuple(products), tuple(prs))


def sbox_to_json(sbox: SBox) -> str:
    return sbox.label


def sbox_from_json(value: Any) -> SBox:
    if (
        not isinstance(value, str)
        or len(value) != 3
        or value[0] != "S"
        or value[1] not in "01"
        or value[2] not in "01"
    ):
        raise ValidationError(f"expected an S-box label like \"S01\", got {value!r}")
    return SBox(int(value[1]), int(value[2]))


def round_log_to_json(log: RoundLog) -> dict:
    return {
        "round_id": log.round_id,
        "member_id": log.member_id,
        "x": log.x,
        "y": log.y,
        "a": log.a,
        "b": log.b,
        "referee_inference": sbox_to_json(log.referee_inference),
        "alice_actual": sbox_to_json(log.alice_actual),
    }


def round_log_from_json(obj: Any) -> RoundLog:
    return RoundLog(
        round_id=_index_from_json(_field(obj, "round_id"), "round_id"),
        member_id=_index_from_json(_field(obj, "member_id"), "member_id"),
        x=_bit_from_json(_field(obj, "x"), "x"),
        y=_bit_from_json(_field(obj, "y"), "y"),
        a=_bit_from_json(_field(obj, "a"), "a"),
        b=_bit_from_json(_field(obj, "b"), "b"),
        referee_inference=sbox_from_json(_field(obj, "referee_inference")),
        alice_actual=sbox_from_json(_field(obj, "alice_actual")),
    )


def logs_to_ndjson(logs: list[RoundLog]) -> str:
    return "".join(
        json.dumps(round_log_to_json(log), sort_keys=True) + "\n" for log in logs
    )


def logs_from_ndjson(text: str) -> list[RoundLog]:
    logs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad JSON on log line {lineno}: {exc}") from exc
        logs.append(round_log_from_json(obj))
    return logs


def _jsonify(value: Any) -> Any:
    # best-effort conversion for report witnesses
    if isinstance(value, Fraction):
        return fraction_to_json(value)
    if isinstance(value, SBox):
        return sbox_to_json(value)
    if isinstance(value, LocalBox):
        return local_box_to_json(value)
    if isinstance(value, BipartiteBox):
        return bipartite_box_to_json(value)
    if isinstance(value, Ensemble):
        return ensemble_to_json(value)
    if isinstance(value, NonlocalEnsemble):
        return nonlocal_ensemble_to_json(value)
    if isinstance(value, dict):
        return {_key(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return repr(value)


def _key(key: Any) -> str:
    if isinstance(key, SBox):
        return key.label
    if isinstance(key, tuple):
        return ",".join(str(part) for part in key)
    return str(key)


def verification_report_to_json(report: VerificationReport) -> dict:
    return {
        "passed": report.passed,
        "checks": [
            {
                "name": check.name,
                "passed": check.passed,
                "witness": _jsonify(check.witness),
            }
            for check in report.checks
        ],
    }


def target_to_json(target: TargetState) -> dict:
    return {"s": fraction_to_json(target.s), "t": fraction_to_json(target.t)}


def target_from_json(obj: Any) -> TargetState:
    return TargetState(
        fraction_from_json(_field(obj, "s")), fraction_from_json(_field(obj, "t"))
    )


def blind_report_to_json(report: BlindReport) -> dict:
    doc = verification_report_to_json(report)
    doc.update(
        {
            "target": target_to_json(report.target),
            "canonical_target": target_to_json(report.canonical_target),
            "relabeling": {
                "flip_outputs": report.relabeling.flip_outputs,
                "flip_inputs": report.relabeling.flip_inputs,
            },
            "upper_ensemble": ensemble_to_json(report.expected_upper),
            "lower_ensemble": ensemble_to_json(report.expected_lower),
            "bob_posterior_supports": {
                f"{y},{b}": list(labels)
                for (y, b), labels in report.posterior_supports
            },
        }
    )
    return doc


def input_policy_to_json(policy: InputPolicy) -> dict:
    return {
        "table": [[fraction_to_json(p) for p in row] for row in policy.table]
    }


def input_policy_from_json(obj: Any) -> InputPolicy:
    table = _field(obj, "table")
    if not isinstance(table, list) or len(table) != 2:
        raise ValidationError("policy table must have 2 rows (x = 0, 1)")
    rows = []
    for row in table:
        if not isinstance(row, list) or len(row) != 2:
            raise ValidationError("each policy row must have 2 entries (y = 0, 1)")
        rows.append(tuple(fraction_from_json(p) for p in row))
    return InputPolicy(tuple(rows))


def audit_verdict_to_json(verdict: AuditVerdict) -> dict:
    return {
        "passed": verdict.passed,
        "mismatch_count": verdict.mismatch_count,
        "mismatch_rounds": list(verdict.mismatch_rounds),
        "significance": verdict.significance,
        "frequency_cells": [
            {
                "y": cell.input_choice,
                "constituent": sbox_to_json(cell.constituent),
                "expected": fraction_to_json(cell.expected),
                "observed": cell.observed,
                "total": cell.total,
                "pvalue": cell.pvalue,
                "ok": cell.ok,
            }
            for cell in verdict.frequency_cells
        ],
    }


def simulation_report_to_json(report: SimulationReport) -> dict:
    return {
        "rounds": report.rounds,
        "rng_seed": report.rng_seed,
        "policy": input_policy_to_json(report.policy),
        "empirical_joint": _jsonify(report.empirical_joint),
        "alice_frequencies": {
            str(y): {sbox.label: freq for sbox, freq in cells.items()}
            for y, cells in report.alice_frequencies.items()
        },
        "alice_frequencies_by_outcome": {
            f"{y},{b}": {sbox.label: freq for sbox, freq in cells.items()}
            for (y, b), cells in report.alice_frequencies_by_outcome.items()
        },
        "verdict": audit_verdict_to_json(report.verdict),
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
