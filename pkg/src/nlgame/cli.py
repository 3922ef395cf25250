"""Command-line front end: seeded experiments, verification, tables.

Reports are deterministic given their config: no timestamps, fixed key
order, exact rationals rendered as p/q plus a 12-significant-digit
decimal.  The json and csv renderings carry identical numeric content;
text is a human-oriented view of the same data.  Trials parallelize
across processes when NLGAME_WORKERS is set, with results merged in
trial order so the report does not depend on scheduling.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from csv import writer as csv_writer
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from io import StringIO
from json import dumps
from math import log2, sqrt
from pathlib import Path

from . import __version__
from .bounds import (
    GF2Family,
    check_gf2_condition,
    exhaustive_min_loss,
    find_gf2_family,
    min_dimension_general,
    min_transcripts_simple,
    verify_lemma_chain,
)
from .games import (
    GameSpec,
    SplitMix64,
    broadcast_complexity,
    enumerate_branches,
    make_general_game,
    make_simple_game,
    run_game,
)
from .strategies import (
    classical_label_strategy,
    general_strategy_forbidden_mass,
    losing_probability_formula,
    quantum_general_strategy,
    quantum_simple_strategy,
    simple_strategy_losing_mass,
    strategy_from_name,
)

__all__ = [
    "ExperimentConfig",
    "Report",
    "cmd_play",
    "cmd_verify",
    "cmd_table",
    "cmd_lemma",
    "build_parser",
    "main",
]

DEFAULT_SEED = 42
DEFAULT_N = 5

# instance counts explode with n; enumerate all randomness branches up to
# these sizes and fall back to seeded per-instance runs above them
_EXHAUSTIVE_RUNS_SIMPLE = 8
_EXHAUSTIVE_RUNS_GENERAL = 8
_SAMPLED_RUNS_PER_INSTANCE = 8


class UsageError(ValueError):
    pass


def decimal_string(value: Fraction) -> str:
    """12-significant-digit decimal rendering of an exact rational."""
    with localcontext() as ctx:
        ctx.prec = 12
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def fraction_fields(value: Fraction) -> dict:
    return {
        "ratio": f"{value.numerator}/{value.denominator}",
        "decimal": decimal_string(value),
    }


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    game: str = "simple"
    n: int = DEFAULT_N
    n_range: tuple[int, int] | None = None
    strategy: str | None = None
    mode: str = "play"
    trials: int | None = None
    seed: int = DEFAULT_SEED
    output_format: str = "text"
    output_path: str | None = None
    max_l: int | None = None
    family_path: str | None = None

    def echo(self) -> dict:
        out: dict = {"command": self.command, "seed": self.seed}
        if self.command == "verify":
            out["n"] = self.n
        if self.command == "play":
            out["game"] = self.game
            out["n"] = self.n
            out["strategy"] = self.strategy
            out["mode"] = self.mode
            out["trials"] = self.trials
        if self.command == "table":
            out["n_range"] = list(self.n_range or ())
        if self.command == "lemma":
            out["n"] = None if self.family_path else self.n
            out["max_l"] = self.max_l
            out["family"] = self.family_path
        return out


@dataclass
class Report:
    config: dict
    results: dict
    checks: list = field(default_factory=list)
    version: str = __version__

    def payload(self) -> dict:
        return {
            "config": self.config,
            "results": self.results,
            "checks": self.checks,
            "version": self.version,
        }

    def failed_checks(self) -> list[str]:
        return [c["name"] for c in self.checks if c["status"] == "fail"]

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return dumps(self.payload(), indent=2, sort_keys=True) + "\n"
        if fmt == "csv":
            return self._render_csv()
        if fmt == "text":
            return self._render_text()
        raise UsageError(f"unknown format {fmt!r}")

    def _render_csv(self) -> str:
        buf = StringIO()
        out = csv_writer(buf, lineterminator="\n")
        out.writerow(["key", "value"])
        for key, value in _flatten(self.payload()):
            out.writerow([key, value])
        return buf.getvalue()

    def _render_text(self) -> str:
        lines = [f"nlgame report (version {self.version})", "[config]"]
        for key, value in _flatten({"": self.config}):
            lines.append(f"  {key.lstrip('.')} = {value}")
        lines.append("[results]")
        rows = self.results.get("rows")
        if isinstance(rows, list) and rows and isinstance(rows[0], dict):
            lines += _text_table(rows)
            extra = {k: v for k, v in self.results.items() if k != "rows"}
            for key, value in _flatten({"": extra}):
                lines.append(f"  {key.lstrip('.')} = {value}")
        else:
            for key, value in _flatten({"": self.results}):
                lines.append(f"  {key.lstrip('.')} = {value}")
        if self.checks:
            lines.append("[checks]")
            for c in self.checks:
                lines.append(f"  {c['status'].upper():4s} {c['name']}: {c['detail']}")
        return "\n".join(lines) + "\n"


def _scalar(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool) or isinstance(value, (int, float)):
        return dumps(value)
    return str(value)


def _flatten(value, prefix: str = ""):
    if isinstance(value, dict):
        for key in sorted(value):
            yield from _flatten(value[key], f"{prefix}.{key}" if prefix else key)
    elif isinstance(value, (list, tuple)):
        for idx, item in enumerate(value):
            yield from _flatten(item, f"{prefix}.{idx}")
    else:
        yield prefix, _scalar(value)


def _text_table(rows: list[dict]) -> list[str]:
    columns = list(rows[0])
    cells = [[_scalar(r.get(c)) or "-" for c in columns] for r in rows]
    widths = [
        max(len(c), max(len(row[k]) for row in cells)) for k, c in enumerate(columns)
    ]
    header = "  " + "  ".join(c.ljust(widths[k]) for k, c in enumerate(columns))
    rule = "  " + "  ".join("-" * w for w in widths)
    body = ["  " + "  ".join(row[k].rjust(widths[k]) for k in range(len(columns)))
            for row in cells]
    return [header, rule] + body


# ---------------------------------------------------------------------------
# play

def _build_spec(game: str, n: int) -> GameSpec:
    if game == "simple":
        return make_simple_game(n)
    if game == "general":
        return make_general_game(n)
    raise UsageError(f"unknown game {game!r}")


def _default_strategy(game: str) -> str:
    return "quantum-simple" if game == "simple" else "quantum-general"


def _run_trial_block(
    game: str, n: int, strategy_name: str, seed: int, start: int, count: int
) -> tuple[int, int, dict[int, int]]:
    # rebuilt per process: specs and strategies hold closures and do not pickle
    spec = _build_spec(game, n)
    strategy = strategy_from_name(strategy_name, n)
    wins = 0
    max_bits = 0
    histogram: dict[int, int] = {}
    for trial in range(start, start + count):
        rng = SplitMix64(seed + trial)
        instance = spec.sample(rng)
        result = run_game(instance, strategy, rng)
        wins += result.won
        bits = result.broadcast_bits
        histogram[bits] = histogram.get(bits, 0) + 1
        max_bits = max(max_bits, bits)
    return wins, max_bits, histogram


def _worker_count() -> int:
    raw = os.environ.get("NLGAME_WORKERS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _play_sampled(config: ExperimentConfig) -> dict:
    trials = config.trials or 0
    args = (config.game, config.n, config.strategy, config.seed)
    workers = min(_worker_count(), trials)
    if workers > 1:
        chunk = -(-trials // workers)
        blocks = [
            (*args, start, min(chunk, trials - start))
            for start in range(0, trials, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_trial_block_star, blocks))
    else:
        parts = [_run_trial_block(*args, 0, trials)]
    wins = sum(p[0] for p in parts)
    max_bits = max(p[1] for p in parts)
    histogram: dict[int, int] = {}
    for _, _, h in parts:
        for bits, count in h.items():
            histogram[bits] = histogram.get(bits, 0) + count
    rate = Fraction(wins, trials)
    return {
        "trials": trials,
        "wins": wins,
        "losses": trials - wins,
        "win_rate_decimal": decimal_string(rate),
        "loss_rate_decimal": decimal_string(1 - rate),
        "broadcast_bits_max": max_bits,
        "broadcast_bits_histogram": [
            [bits, histogram[bits]] for bits in sorted(histogram)
        ],
    }


def _run_trial_block_star(block) -> tuple[int, int, dict[int, int]]:
    return _run_trial_block(*block)


def _play_exhaustive(config: ExperimentConfig) -> dict:
    spec = _build_spec(config.game, config.n)
    strategy = strategy_from_name(config.strategy, config.n)
    total = Fraction(0)
    worst = Fraction(1)
    max_bits = 0
    all_won = True
    count = 0
    for instance in spec.enumerate():
        count += 1
        win_mass = Fraction(0)
        for result, prob in enumerate_branches(instance, strategy):
            if result.won:
                win_mass += prob
            else:
                all_won = False
            max_bits = max(max_bits, result.broadcast_bits)
        total += win_mass
        worst = min(worst, win_mass)
    return {
        "instances": count,
        "win_rate": fraction_fields(total / count),
        "min_instance_win_rate": fraction_fields(worst),
        "broadcast_bits_max": max_bits,
        "all_branches_won": all_won,
    }


def cmd_play(config: ExperimentConfig) -> Report:
    if config.strategy is None:
        raise UsageError("play needs a strategy")
    _build_spec(config.game, config.n)  # validates game and n early
    try:
        strategy_from_name(config.strategy, config.n)
    except ValueError as err:
        raise UsageError(str(err)) from None
    if config.mode == "exhaustive":
        results = _play_exhaustive(config)
    else:
        if not config.trials or config.trials < 1:
            raise UsageError("play needs trials >= 1")
        results = _play_sampled(config)
    return Report(config=config.echo(), results=results)


# ---------------------------------------------------------------------------
# verify

def _sampled_bits_check(
    spec: GameSpec, strategy, seed: int
) -> tuple[int, int, bool]:
    """(min bits, max bits, all won) over seeded runs of every instance."""
    lo, hi, all_won = None, 0, True
    for index, instance in enumerate(spec.enumerate()):
        for rep in range(_SAMPLED_RUNS_PER_INSTANCE):
            rng = SplitMix64(seed + 1_000_003 * index + rep)
            result = run_game(instance, strategy, rng)
            bits = result.broadcast_bits
            lo = bits if lo is None else min(lo, bits)
            hi = max(hi, bits)
            all_won = all_won and result.won
    return lo or 0, hi, all_won


def _check_simple_quantum(n: int, seed: int) -> tuple[bool, str]:
    spec = make_simple_game(n)
    strategy = quantum_simple_strategy(n)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    bad = [p for p in pairs if simple_strategy_losing_mass(n, p) != 0]
    if bad:
        return False, f"nonzero losing mass at pairs {bad[:3]}"
    if n <= _EXHAUSTIVE_RUNS_SIMPLE:
        seen_bits: set[int] = set()
        all_won = True
        for instance in spec.enumerate():
            for result, _prob in enumerate_branches(instance, strategy):
                seen_bits.add(result.broadcast_bits)
                all_won = all_won and result.won
        lo, max_bits = min(seen_bits), max(seen_bits)
        how = "all branches"
    else:
        lo, max_bits, all_won = _sampled_bits_check(spec, strategy, seed)
        how = f"{_SAMPLED_RUNS_PER_INSTANCE} seeded runs per instance"
    if not (all_won and lo == max_bits == 1):
        return False, f"expected 1 broadcast bit and wins, got max {max_bits} bits"
    return True, (
        f"losing mass exactly 0 on all {len(pairs)} pairs; "
        f"broadcast bits = 1 ({how})"
    )


def _chosen_sets(n: int):
    for k in range(2, n + 1, 4):
        yield from itertools.combinations(range(1, n + 1), k)


def _check_general_quantum(n: int, seed: int) -> tuple[bool, str]:
    spec = make_general_game(n)
    strategy = quantum_general_strategy(n)
    sets = list(_chosen_sets(n))
    bad = [c for c in sets if general_strategy_forbidden_mass(n, c) != 0]
    if bad:
        return False, f"nonzero even-parity mass at C = {bad[:3]}"
    if n <= _EXHAUSTIVE_RUNS_GENERAL:
        max_bits, all_won = broadcast_complexity(spec, strategy, "exhaustive")
        how = "all branches"
    else:
        _, max_bits, all_won = _sampled_bits_check(spec, strategy, seed)
        how = f"{_SAMPLED_RUNS_PER_INSTANCE} seeded runs per instance"
    if not (all_won and max_bits <= 1):
        return False, f"expected <= 1 broadcast bit and wins, got max {max_bits}"
    return True, (
        f"even-parity mass exactly 0 on all {len(sets)} chosen sets; "
        f"broadcast bits <= 1 ({how})"
    )


def _check_min_loss(n: int) -> tuple[bool, str, dict]:
    search = exhaustive_min_loss(n)
    formula = losing_probability_formula(n)
    data = {"min_loss": fraction_fields(search.min_loss)}
    if search.min_loss != formula:
        return False, (
            f"search gives {search.min_loss}, formula gives {formula}"
        ), data
    p = search.min_loss
    return True, f"p({n}) = {p.numerator}/{p.denominator} matches the formula", data


def _check_transcripts(n: int) -> tuple[bool, str, dict]:
    found = min_transcripts_simple(n)
    expected = (n - 1).bit_length()
    data = {"min_transcripts": found}
    if found != expected:
        return False, f"search gives {found}, ceil(log2 {n}) = {expected}", data
    if (1 << found) < n:
        return False, f"2^{found} < {n}: log2 bound violated", data
    return True, (
        f"l_min = {found} = ceil(log2 {n}); implies broadcast bits >= log2 log2 {n}"
    ), data


def _check_labeling(n: int) -> tuple[bool, str]:
    width = max(1, (n - 1).bit_length())
    max_bits, all_won = broadcast_complexity(
        make_general_game(n), classical_label_strategy(n), "exhaustive"
    )
    if not (all_won and max_bits == width):
        return False, f"expected wins at {width} bits, got max {max_bits}"
    return True, f"wins every instance at exactly {width} broadcast bits"


def _check_lemma_chain(n: int) -> tuple[bool, str, dict]:
    report = verify_lemma_chain(n)
    data = {"lemma_chain": report.as_dict()}
    if not report.all_hold():
        return False, "bound chain violated", data
    return True, (
        f"l_min = {report.min_dimension} >= sqrt({n}) - 2 = {report.sqrt_bound:g}; "
        f"upper bound {report.transcript_upper_bound} holds"
    ), data


def cmd_verify(config: ExperimentConfig) -> Report:
    n = config.n
    checks: list[dict] = []
    results: dict = {"n": n}

    def record(name: str, lo: int, hi: int, runner) -> None:
        if not lo <= n <= hi:
            checks.append(
                {
                    "name": name,
                    "status": "skipped",
                    "detail": f"defined for {lo} <= n <= {hi}",
                }
            )
            return
        outcome = runner()
        passed, detail = outcome[0], outcome[1]
        if len(outcome) > 2:
            results.update(outcome[2])
        checks.append(
            {"name": name, "status": "pass" if passed else "fail", "detail": detail}
        )

    record("simple-quantum-certainty", 3, 12, lambda: _check_simple_quantum(n, config.seed))
    record("general-quantum-certainty", 2, 12, lambda: _check_general_quantum(n, config.seed))
    record("classical-min-loss-formula", 5, 12, lambda: _check_min_loss(n))
    record("simple-transcript-lower-bound", 2, 16, lambda: _check_transcripts(n))
    record("labeling-universality", 2, 10, lambda: _check_labeling(n))
    record("gf2-lemma-chain", 2, 10, lambda: _check_lemma_chain(n))

    tally = {"pass": 0, "fail": 0, "skipped": 0}
    for c in checks:
        tally[c["status"]] += 1
    results["passed"] = tally["pass"]
    results["failed"] = tally["fail"]
    results["skipped"] = tally["skipped"]
    return Report(config=config.echo(), results=results, checks=checks)


# ---------------------------------------------------------------------------
# table

def _parse_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"expected N or LO:HI, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def cmd_table(config: ExperimentConfig) -> Report:
    lo, hi = config.n_range or (5, 16)
    lo, hi = max(lo, 5), min(hi, 64)  # formula domain
    if lo > hi:
        raise UsageError("range does not intersect the formula domain [5, 64]")
    rows = []
    for n in range(lo, hi + 1):
        p = losing_probability_formula(n)
        rows.append(
            {
                "n": n,
                "p_ratio": f"{p.numerator}/{p.denominator}",
                "p_decimal": decimal_string(p),
                "ceil_log2_n": (n - 1).bit_length(),
                "log2_log2_n": log2(log2(n)),
                "half_log2_n_minus_2": log2(n) / 2 - 2.0,
                "sqrt_n_minus_2": sqrt(n) - 2.0,
                "l_min_simple": min_transcripts_simple(n) if n <= 16 else None,
                "l_min_general": min_dimension_general(n) if n <= 10 else None,
            }
        )
    results = {"rows": rows, "range": [lo, hi]}
    return Report(config=config.echo(), results=results)


# ---------------------------------------------------------------------------
# lemma

def cmd_lemma(config: ExperimentConfig) -> Report:
    if config.family_path is not None:
        try:
            lines = Path(config.family_path).read_text().splitlines()
        except OSError as err:
            raise UsageError(f"cannot read family file: {err}") from None
        try:
            family = GF2Family.from_lines(lines)
        except ValueError as err:
            raise UsageError(f"bad family file: {err}") from None
        holds = check_gf2_condition(family)
        results = {
            "n": family.n,
            "dimension": family.dimension,
            "condition_holds": holds,
        }
        return Report(config=config.echo(), results=results)

    n = config.n
    if not 2 <= n <= 10:
        raise UsageError(f"lemma search supports 2 <= n <= 10, got {n}")
    if config.max_l is not None:
        found = None
        for dimension in range(1, config.max_l + 1):
            family = find_gf2_family(n, dimension)
            if family is not None:
                found = family
                break
        results = {
            "n": n,
            "max_l": config.max_l,
            "found_dimension": found.dimension if found else None,
            "witness": found.to_lines() if found else None,
        }
        return Report(config=config.echo(), results=results)

    report = verify_lemma_chain(n)
    witness = find_gf2_family(n, report.min_dimension)
    assert witness is not None
    results = dict(report.as_dict())
    results["witness"] = witness.to_lines()
    checks = [
        {
            "name": "lemma-chain",
            "status": "pass" if report.all_hold() else "fail",
            "detail": (
                f"sqrt({n}) - 2 <= l_min = {report.min_dimension} "
                f"<= {report.transcript_upper_bound}"
            ),
        }
    ]
    return Report(config=config.echo(), results=results, checks=checks)


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlgame",
        description="Simulator and verifier for the n-player pair and parity games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument(
            "--format", choices=("json", "csv", "text"), default="text"
        )
        p.add_argument("--out", metavar="PATH")

    play = sub.add_parser("play", help="run seeded or exhaustive games")
    play.add_argument("--game", choices=("simple", "general"), default="simple")
    play.add_argument("--n", type=int, default=DEFAULT_N)
    play.add_argument("--strategy", metavar="NAME")
    play.add_argument("--trials", type=_positive_int, default=1000)
    play.add_argument(
        "--exhaustive",
        action="store_true",
        help="fold over every instance and randomness branch instead of sampling",
    )
    add_common(play)

    verify = sub.add_parser("verify", help="run the invariant suite for one n")
    verify.add_argument("--n", type=int, default=DEFAULT_N)
    add_common(verify)

    table = sub.add_parser("table", help="emit the bound table over a range of n")
    table.add_argument("--n", metavar="N|LO:HI", default="5:16")
    add_common(table)

    lemma = sub.add_parser("lemma", help="subset-parity condition checks and searches")
    lemma.add_argument("--n", type=int, default=DEFAULT_N)
    lemma.add_argument("--family", metavar="PATH")
    lemma.add_argument("--max-l", dest="max_l", type=_positive_int)
    add_common(lemma)
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.command == "play":
        return ExperimentConfig(
            command="play",
            game=args.game,
            n=args.n,
            strategy=args.strategy or _default_strategy(args.game),
            mode="exhaustive" if args.exhaustive else "play",
            trials=None if args.exhaustive else args.trials,
            seed=args.seed,
            output_format=args.format,
            output_path=args.out,
        )
    if args.command == "verify":
        return ExperimentConfig(
            command="verify",
            n=args.n,
            mode="verify",
            seed=args.seed,
            output_format=args.format,
            output_path=args.out,
        )
    if args.command == "table":
        return ExperimentConfig(
            command="table",
            n_range=_parse_range(args.n),
            seed=args.seed,
            output_format=args.format,
            output_path=args.out,
        )
    return ExperimentConfig(
        command="lemma",
        n=args.n,
        seed=args.seed,
        output_format=args.format,
        output_path=args.out,
        max_l=args.max_l,
        family_path=args.family,
    )


_COMMANDS = {
    "play": cmd_play,
    "verify": cmd_verify,
    "table": cmd_table,
    "lemma": cmd_lemma,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        report = _COMMANDS[config.command](config)
        rendered = report.render(config.output_format)
    except UsageError as err:
        print(f"nlgame: error: {err}", file=sys.stderr)
        return 2
    if config.output_path:
        Path(config.output_path).write_text(rendered)
    else:
        sys.stdout.write(rendered)
    failed = report.failed_checks()
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
