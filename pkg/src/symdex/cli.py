"""Batch front end: parse set/series JSON, run a procedure, emit a report.

Reports are deterministic: the same request (including its seed) gives
byte-identical output. Every report embeds a ``replay`` section listing
membership checks and exact scalar comparisons that re-verify its
certificates; the ``oracle`` command re-runs those checks and nothing
else.

Exit codes: 0 success (including stalled / not-achievable outcomes),
1 invariant violation, 2 invalid input, 3 budget exhaustion.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction

from . import __version__
from . import extraction as ext
from . import indexes, series as series_mod, sets
from .errors import (
    BudgetExceeded,
    InvalidInput,
    NotAchievable,
    NotFound,
    SequenceStalled,
    SymdexError,
    TreeStalled,
    UnboundedDiameter,
)
from .errors import ExtractionStalled
from .vectors import (
    NormKind,
    SparseVec,
    as_length,
    as_scalar,
    dual_norm,
    dual_pair,
    format_scalar,
    linear_combination,
    norm,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3


def decimal_string(value: Fraction, digits: int) -> str:
    """Non-authoritative fixed-point display (round half up)."""
    sign = "-" if value < 0 else ""
    scaled = abs(value) * 10 ** digits
    whole, rem = divmod(scaled.numerator, scaled.denominator)
    if 2 * rem >= scaled.denominator:
        whole += 1
    integral, frac = divmod(whole, 10 ** digits)
    if digits == 0:
        return f"{sign}{integral}"
    return f"{sign}{integral}.{str(frac).zfill(digits)}"


# ---------------------------------------------------------------------------
# replay checks


def check_entry(entry: dict) -> bool:
    """Re-verify one replay entry with membership and exact arithmetic."""
    kind = entry["kind"]
    if kind == "contains":
        expr = sets.set_from_json(entry["set"])
        v = SparseVec.from_json(entry["vector"])
        return sets.contains(expr, v) == entry.get("expected", True)
    if kind in ("norm_ge", "norm_le"):
        v = SparseVec.from_json(entry["vector"])
        value = norm(v, NormKind.parse(entry["norm"]))
        threshold = as_scalar(entry["threshold"])
        return value >= threshold if kind == "norm_ge" else value <= threshold
    if kind == "dual_norm_eq":
        f = SparseVec.from_json(entry["functional"])
        return dual_norm(f, NormKind.parse(entry["norm"])) == as_scalar(entry["value"])
    if kind == "dual_pair_eq":
        f = SparseVec.from_json(entry["functional"])
        v = SparseVec.from_json(entry["vector"])
        return dual_pair(f, v) == as_scalar(entry["value"])
    if kind == "dual_pair_gt":
        f = SparseVec.from_json(entry["functional"])
        v = SparseVec.from_json(entry["vector"])
        return dual_pair(f, v) > as_scalar(entry["value"])
    if kind == "midpoint":
        parent = SparseVec.from_json(entry["parent"])
        left = SparseVec.from_json(entry["left"])
        right = SparseVec.from_json(entry["right"])
        return (left + right).scale(Fraction(1, 2)) == parent
    if kind == "scalar_le":
        return as_scalar(entry["left"]) <= as_scalar(entry["right"])
    if kind == "scalar_lt":
        return as_scalar(entry["left"]) < as_scalar(entry["right"])
    raise InvalidInput(f"unknown replay check kind {kind!r}")


def verify_replay(report: dict) -> list[int]:
    """Indices of replay entries that fail re-verification."""
    failures = []
    for pos, entry in enumerate(report.get("replay", [])):
        if not check_entry(entry):
            failures.append(pos)
    return failures


def _contains_entry(expr, v: SparseVec, expected: bool = True) -> dict:
    return {
        "kind": "contains",
        "set": sets.set_to_json(expr),
        "vector": v.to_json(),
        "expected": expected,
    }


def _free_direction_replay(expr, witnesses, d, kind: NormKind, lower: Fraction) -> list[dict]:
    entries = []
    for w in witnesses:
        entries.append(_contains_entry(expr, w + d))
        entries.append(_contains_entry(expr, w - d))
    entries.append(
        {
            "kind": "norm_ge",
            "vector": d.to_json(),
            "norm": kind.value,
            "threshold": format_scalar(lower),
        }
    )
    return entries


# ---------------------------------------------------------------------------
# input parsing


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise InvalidInput(f"input file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"input is not valid JSON: {exc}") from None


def _parse_set_input(obj, norm_flag: str | None):
    """Accept a bare tagged SetExpr or an envelope {"set":..., "norm":...}."""
    if isinstance(obj, dict) and "set" in obj:
        expr = sets.set_from_json(obj["set"])
        kind = NormKind.parse(norm_flag or obj.get("norm", "sup"))
        point = SparseVec.from_json(obj["point"]) if "point" in obj else None
        return expr, kind, point
    expr = sets.set_from_json(obj)
    return expr, NormKind.parse(norm_flag or "sup"), None


def _strategy(args, expr) -> indexes.SearchStrategy:
    pool = indexes.default_pool(expr)
    return indexes.SearchStrategy.parse(args.strategy, pool)


# ---------------------------------------------------------------------------
# command handlers; each returns (result, replay, outcome)


def _run_delta(args):
    obj = _load_json(args.infile)
    expr, kind, _ = _parse_set_input(obj, args.norm)
    curve = indexes.delta_curve(expr, args.n, _strategy(args, expr), kind, seed=args.seed)
    replay: list[dict] = []
    rows = []
    for res in curve:
        rows.append(res.to_json())
        for w in res.upper_witnesses:
            replay.append(_contains_entry(expr, w))
        if res.N >= 1 and res.lower_certificate and res.lower_certificate.value > 0:
            d = indexes.challenge_lower(
                res.lower_certificate, expr, list(res.upper_witnesses), kind
            )
            replay.extend(
                _free_direction_replay(
                    expr, list(res.upper_witnesses), d, kind, res.lower_certificate.value
                )
            )
        if res.bound.lower is not None and res.bound.upper is not None:
            replay.append(
                {
                    "kind": "scalar_le",
                    "left": format_scalar(res.bound.lower),
                    "right": format_scalar(res.bound.upper),
                }
            )
    return {"curve": rows, "norm": kind.value}, replay, "ok"


def _run_extract(args):
    obj = _load_json(args.infile)
    expr, kind, _ = _parse_set_input(obj, args.norm)
    epsilon = as_scalar(args.epsilon)
    outcome = "ok"
    try:
        transcript = ext.extract_c0_sequence(expr, epsilon, args.n, kind)
    except ExtractionStalled as stall:
        transcript = stall.partial
        outcome = "stalled"
    validation = ext.validate_transcript(transcript, seed=args.seed)
    if not validation["ok"]:
        raise SymdexError("transcript validation failed")
    rng = random.Random(args.seed)
    margin_rows = []
    worst_lower = None
    for _ in range(32):
        coeffs = [
            Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000))
            for _ in transcript.steps
        ]
        lo, hi = ext.verify_basis_inequality(transcript, coeffs)
        margin_rows.append((lo, hi))
        if worst_lower is None or lo < worst_lower:
            worst_lower = lo
    replay = []
    for n, step in enumerate(transcript.steps, start=1):
        replay.append(_contains_entry(step.set_before, step.x))
        replay.append(
            {
                "kind": "dual_norm_eq",
                "functional": step.f.to_json(),
                "norm": kind.value,
                "value": "1",
            }
        )
        for k in range(n - 1):
            replay.append(
                {
                    "kind": "dual_pair_eq",
                    "functional": step.f.to_json(),
                    "vector": transcript.steps[k].x.to_json(),
                    "value": "0",
                }
            )
    for lo, hi in margin_rows:
        replay.append({"kind": "scalar_le", "left": "0", "right": format_scalar(lo)})
        replay.append({"kind": "scalar_le", "left": "0", "right": format_scalar(hi)})
    if margin_rows and any(lo < 0 or hi < 0 for lo, hi in margin_rows):
        raise SymdexError("negative basis-inequality margin")
    result = {
        "transcript": transcript.to_json(),
        "validation": validation,
        "margin_samples": [
            {"lower": format_scalar(lo), "upper": format_scalar(hi)} for lo, hi in margin_rows
        ],
    }
    return result, replay, outcome


def _run_refine(args):
    obj = _load_json(args.infile)
    expr, kind, _ = _parse_set_input(obj, args.norm)
    epsilon = as_scalar(args.epsilon)
    try:
        refined = ext.refine_almost_isometric(
            expr, epsilon, _strategy(args, expr), args.n, kind, seed=args.seed
        )
    except NotFound as miss:
        return {"outcome": "not_found", "best": miss.best}, [], "not_found"
    low = indexes.delta_lower(expr, 1, kind).lower_certificate
    d0 = indexes.delta0(refined, kind, seed=args.seed)
    replay = [
        {
            "kind": "scalar_le",
            "left": format_scalar(d0.upper),
            "right": format_scalar(
                (1 + epsilon) * (1 + epsilon) * low.value
                if kind is NormKind.EUCLID
                else (1 + epsilon) * low.value
            ),
        }
    ]
    result = {
        "refined": sets.set_to_json(refined),
        "delta0": d0.to_json(),
        "limit_lower": low.to_json(),
    }
    return result, replay, "ok"


def _run_tree(args):
    obj = _load_json(args.infile)
    expr, kind, _ = _parse_set_input(obj, args.norm)
    epsilon = as_scalar(args.epsilon)
    try:
        tree = ext.build_eps_tree(expr, epsilon, args.depth, kind)
    except TreeStalled as stall:
        return {"outcome": "stalled", "node": stall.node}, [], "stalled"
    replay = []
    for n in range(1, tree.internal_count + 1):
        replay.append(
            {
                "kind": "midpoint",
                "parent": tree.node(n).to_json(),
                "left": tree.node(2 * n).to_json(),
                "right": tree.node(2 * n + 1).to_json(),
            }
        )
        replay.append(
            {
                "kind": "norm_ge",
                "vector": (tree.node(2 * n + 1) - tree.node(2 * n)).to_json(),
                "norm": kind.value,
                "threshold": format_scalar(as_length(2 * epsilon, kind)),
            }
        )
    for pos in range(len(tree.nodes)):
        replay.append(_contains_entry(expr, tree.nodes[pos]))
    return {"tree": tree.to_json()}, replay, "ok"


def _run_series(args):
    obj = _load_json(args.infile)
    series = series_mod.SeriesSpec.from_json(obj)
    epsilon = as_scalar(args.epsilon)
    wuc = series_mod.wuc_bound(series)
    result = {"wuc_bound": format_scalar(wuc), "horizon": series.horizon, "norm": series.norm.value}
    replay: list[dict] = []
    try:
        tail = series_mod.unconditional_tail_bound(series, epsilon, enum_budget=args.budget)
    except NotAchievable as miss:
        result["outcome"] = "not_achievable"
        if miss.lower_certificate is not None:
            result["lower_certificate"] = miss.lower_certificate.to_json()
            expr = series_mod.sign_sum_set(series, series_mod.SignMode.SUBSETS)
            d = indexes.challenge_lower(miss.lower_certificate, expr, [], series.norm)
            replay.extend(
                _free_direction_replay(expr, [], d, series.norm, miss.lower_certificate.value)
            )
        if miss.best is not None:
            result["best_diameter"] = format_scalar(miss.best[0])
        return result, replay, "not_achievable"
    result["tail"] = {
        "M": tail.M,
        "witnesses": [w.to_json() for w in tail.witnesses],
        "diameter_upper": format_scalar(tail.diameter_upper),
        "replayed_patterns": tail.replayed_patterns,
    }
    expr = series_mod.sign_sum_set(series, series_mod.SignMode.SUBSETS)
    for w in tail.witnesses:
        replay.append(_contains_entry(expr, w))
    replay.append(
        {
            "kind": "scalar_lt",
            "left": format_scalar(tail.diameter_upper),
            "right": format_scalar(as_length(2 * epsilon, series.norm)),
        }
    )
    if tail.M < series.horizon:
        stop = min(tail.M + 8, series.horizon)
        window = series.terms[tail.M : stop]
        from itertools import product

        for signs in product((1, -1), repeat=len(window)):
            total = linear_combination(zip(signs, window))
            replay.append(
                {
                    "kind": "norm_le",
                    "vector": total.to_json(),
                    "norm": series.norm.value,
                    "threshold": format_scalar(as_length(epsilon, series.norm)),
                }
            )
    return result, replay, "ok"


def _run_extreme(args):
    obj = _load_json(args.infile)
    expr, kind, point = _parse_set_input(obj, args.norm)
    if point is None:
        raise InvalidInput("extreme command needs an envelope with a 'point' field")
    epsilon = as_scalar(args.epsilon)
    flag = ext.eps_extreme(expr, point, epsilon, kind, seed=args.seed)
    result = {"eps_extreme": flag, "epsilon": format_scalar(epsilon)}
    replay = [_contains_entry(expr, point)]
    sym = sets.symmetrize(expr, [point])
    bound = sets.diameter(sym, kind, seed=args.seed)
    result["symmetrized_diameter"] = bound.to_json()
    if isinstance(sets.reduced(expr), sets.FinitePoints):
        strong, delta = ext.eps_strong_extreme(sets.reduced(expr), point, epsilon, kind)
        result["eps_strong_extreme"] = strong
        result["delta_witness"] = format_scalar(delta)
    return result, replay, "ok"


def _run_one_sided(args):
    obj = _load_json(args.infile)
    expr, kind, _ = _parse_set_input(obj, args.norm)
    epsilon = as_scalar(args.epsilon)
    try:
        xs = ext.one_sided_sequence(expr, epsilon, args.n, kind)
    except SequenceStalled as stall:
        return (
            {"outcome": "stalled", "step": stall.step, "partial": [v.to_json() for v in stall.partial]},
            [],
            "stalled",
        )
    replay = []
    threshold = format_scalar(as_length(epsilon, kind))
    for v in xs:
        replay.append(
            {"kind": "norm_ge", "vector": v.to_json(), "norm": kind.value, "threshold": threshold}
        )
    diff = sets.difference_set(expr)
    if diff is not None and len(xs) <= 10:
        from itertools import product

        for signs in product((1, -1), repeat=len(xs)):
            total = linear_combination(zip(signs, xs))
            replay.append(_contains_entry(diff, total))
    return {"sequence": [v.to_json() for v in xs]}, replay, "ok"


def _run_oracle(args):
    report = _load_json(args.infile)
    failures = verify_replay(report)
    result = {
        "checked": len(report.get("replay", [])),
        "failed": failures,
    }
    return result, [], "ok" if not failures else "violation"


HANDLERS = {
    "delta": _run_delta,
    "extract": _run_extract,
    "refine": _run_refine,
    "tree": _run_tree,
    "series": _run_series,
    "extreme": _run_extreme,
    "one_sided": _run_one_sided,
    "oracle": _run_oracle,
}


def _write_atomic(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".symdex-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _format_csv(report: dict, digits: int | None) -> str:
    import csv
    import io

    rows = report["result"].get("curve")
    if rows is None:
        raise InvalidInput("csv format is only available for the delta command")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["N", "lower", "upper", "witnesses"]
    if digits:
        header += ["lower_dec", "upper_dec"]
    writer.writerow(header)
    for row in rows:
        lower = row["bound"]["lower"] or "0"
        upper = row["bound"]["upper"] if row["bound"]["upper"] is not None else "inf"
        record = [row["N"], lower, upper, json.dumps(row["upper_witnesses"], sort_keys=True)]
        if digits:
            record.append(decimal_string(as_scalar(lower), digits))
            record.append(
                decimal_string(as_scalar(upper), digits) if upper != "inf" else "inf"
            )
        writer.writerow(record)
    return buffer.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdex",
        description="Symmetrization indexes and structure extraction for bounded sequence sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--in", dest="infile", required=True)
        cmd.add_argument("--out", dest="outfile", required=True)
        cmd.add_argument("--format", choices=("json", "csv"), default="json")
        cmd.add_argument("--n", type=int, default=4)
        cmd.add_argument("--epsilon", default="1/10")
        cmd.add_argument("--depth", type=int, default=3)
        cmd.add_argument(
            "--strategy", choices=("exhaustive", "greedy", "beam"), default="exhaustive"
        )
        cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--budget", type=int, default=200_000)
        cmd.add_argument("--norm", choices=("sup", "sum", "euclid"), default=None)
        cmd.add_argument("--decimal", type=int, default=None)
    return parser


def run(args) -> int:
    handler = HANDLERS[args.command]
    try:
        result, replay, outcome = handler(args)
    except (InvalidInput, KeyError) as exc:
        print(f"symdex: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except UnboundedDiameter as exc:
        # the request asks for a quantity the model says is infinite
        print(f"symdex: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetExceeded as exc:
        print(f"symdex: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SymdexError as exc:
        print(f"symdex: invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION

    report = {
        "version": __version__,
        "command": args.command,
        "request": {
            "input": _load_json(args.infile),
            "parameters": {
                "n": args.n,
                "epsilon": args.epsilon,
                "depth": args.depth,
                "strategy": args.strategy,
                "seed": args.seed,
                "budget": args.budget,
                "norm": args.norm,
                "format": args.format,
                "decimal": args.decimal,
            },
        },
        "outcome": outcome,
        "result": result,
        "replay": replay,
    }
    if args.format == "csv":
        payload = _format_csv(report, args.decimal)
    else:
        payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    _write_atomic(args.outfile, payload)
    print(f"symdex {args.command}: {outcome} -> {args.outfile}")
    if outcome == "violation":
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
