"""Command-line entry point.

    newcomb-bell scenario smoking-gene
    newcomb-bell scenario newcomb --p1 0.99 --p2 0.01
    newcomb-bell bell-game --agent cdt bdt --epsilon 0.1 --sessions 100
    newcomb-bell enumerate-lhv
    newcomb-bell bounds --epsilon-grid 0,0.1,0.5,1 --threshold 2.8
    newcomb-bell repro

Every subcommand accepts ``--config FILE`` (a flat JSON object whose keys are
the long flag names, dashes or underscores), ``--format table|csv|json`` and
``--output PATH``. Flags given on the command line override the config file.
When ``--output-dir`` (or ``$NEWCOMB_BELL_OUTPUT_DIR``) is set, reports are
also written there. Exit status: 0 success, 2 usage or validation error,
1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import traceback
from pathlib import Path

from . import bell_game as bg
from .causal_models import (
    TSIRELSON,
    break_even_epsilon,
    chsh_of_model,
    enumerate_deterministic,
    lhv_chsh_max,
    mixture_chsh_bound,
)
from .decision import Theory, causal_eu, evidential_eu, is_newcomb_type, prescribe
from .errors import NewcombBellError
from .quantum import tsirelson_config
from .scenarios import SCENARIOS, million_box, newcomb_classic, smoking_gene

OUTPUT_DIR_ENV = "NEWCOMB_BELL_OUTPUT_DIR"
DEFAULT_GRID = tuple(round(0.1 * i, 10) for i in range(11))


class UsageError(Exception):
    pass


# -- report rendering --------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return bg.fmt(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, float):
        return float(bg.fmt(v))
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


class Report:
    def __init__(self, title: str):
        self.title = title
        self.sections = []
        self.facts = {}

    def section(self, name: str, columns, rows):
        self.sections.append({"name": name, "columns": list(columns), "rows": [list(r) for r in rows]})
        return self

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {
                "title": self.title,
                "facts": self.facts,
                "sections": [
                    {"name": s["name"], "rows": [dict(zip(s["columns"], r)) for r in s["rows"]]}
                    for s in self.sections
                ],
            }
            return json.dumps(_jsonable(doc), indent=2, ensure_ascii=False) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            many = len(self.sections) > 1 or self.facts
            for s in self.sections:
                if many:
                    buf.write(f"# {s['name']}\n")
                w.writerow(s["columns"])
                for r in s["rows"]:
                    w.writerow([_cell(v) for v in r])
                if many:
                    buf.write("\n")
            if self.facts:
                buf.write("# facts\n")
                w.writerow(["key", "value"])
                for k, v in self.facts.items():
                    w.writerow([k, _cell(v)])
            return buf.getvalue()
        out = [self.title, "=" * len(self.title)]
        for s in self.sections:
            cells = [s["columns"]] + [[_cell(v) for v in r] for r in s["rows"]]
            widths = [max(len(row[i]) for row in cells) for i in range(len(s["columns"]))]
            out += ["", s["name"]]
            for j, row in enumerate(cells):
                out.append("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip())
                if j == 0:
                    out.append("  ".join("-" * w for w in widths))
        if self.facts:
            out.append("")
            width = max(len(k) for k in self.facts)
            out += [f"{k.ljust(width)} : {_cell(v)}" for k, v in self.facts.items()]
        return "\n".join(out) + "\n"


# -- commands ----------------------------------------------------------------


def _scenario_spec(args):
    name = args.name
    if name == "newcomb":
        if args.p1 is None or args.p2 is None:
            raise UsageError("scenario newcomb needs --p1 and --p2 (predictor reliability is never defaulted)")
        return newcomb_classic(args.p1, args.p2, args.prior if args.prior is not None else 0.5)
    if name == "smoking-gene":
        return smoking_gene(args.p_gene if args.p_gene is not None else 0.5)
    if name == "million-box":
        if args.accuracy is None:
            raise UsageError("scenario million-box needs --accuracy")
        boxes = args.boxes if args.boxes is not None else 1_000_000
        return million_box(boxes, args.accuracy)
    raise UsageError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")


def _scenario_report(spec) -> Report:
    problem = spec.problem
    bdt = prescribe(problem, Theory.BDT)
    cdt = prescribe(problem, Theory.CDT)
    rows = [
        [str(a), evidential_eu(problem, a), causal_eu(problem, a),
         a in bdt.best_actions, a in cdt.best_actions]
        for a in problem.actions
    ]
    rep = Report(f"scenario {spec.name}")
    rep.section("expected utilities", ["action", "eu", "ceu", "bdt_best", "cdt_best"], rows)
    rep.facts["bdt"] = ",".join(sorted(map(str, bdt.best_actions)))
    rep.facts["cdt"] = ",".join(sorted(map(str, cdt.best_actions)))
    rep.facts["newcomb_type"] = is_newcomb_type(problem)
    return rep


def cmd_scenario(args) -> Report:
    return _scenario_report(_scenario_spec(args))


def _agents(args) -> list:
    out = []
    for kind in args.agent:
        if kind == "cdt":
            out.append(bg.Agent(Theory.CDT, epsilon=args.epsilon, semantics=args.semantics))
        else:
            out.append(bg.Agent(Theory.BDT))
    return out


def cmd_bell_game(args) -> Report:
    config = bg.GameConfig(
        n_pairs=args.pairs,
        threshold=args.threshold,
        mechanism=args.mechanism,
        seed=args.seed,
    )
    agents = _agents(args)
    keep = args.transcripts is not None
    ledger = bg.run_tournament(config, agents, args.sessions, keep_records=keep)
    rep = Report("bell-game")
    summary = ledger.summary()
    rep.section(
        "ledger",
        ["agent", "sessions", "plays", "declines", "wins", "total", "mean", "win_rate"],
        [[n, s["sessions"], s["plays"], s["declines"], s["wins"], s["total"], s["mean"], s["win_rate"]]
         for n, s in summary.items()],
    )
    session_rows = []
    for name in ledger.payouts:
        for i, (d, f, p, w) in enumerate(zip(ledger.decisions[name], ledger.f_values[name],
                                            ledger.payouts[name], ledger.wins[name])):
            session_rows.append([name, i, d.value, float(f), float(p), bool(w)])
    rep.sessions = (["agent", "session", "decision", "f_statistic", "payout", "won"], session_rows)
    rep.facts.update(
        pairs=config.n_pairs, threshold=float(config.threshold), mechanism=config.mechanism.value,
        seed=config.seed,
    )
    if keep:
        tdir = Path(args.transcripts)
        tdir.mkdir(parents=True, exist_ok=True)
        for name, recs in ledger.records.items():
            for i, rec in enumerate(recs):
                (tdir / f"{_safe(name)}_session{i:04d}.csv").write_text(rec.to_csv())
    return rep


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def cmd_enumerate_lhv(args) -> Report:
    rows = [[*s.as_tuple(), s.f_value] for s in enumerate_deterministic()]
    rep = Report("deterministic local strategies")
    rep.section("strategies", ["a_r", "a_g", "b_r", "b_g", "F"], rows)
    rep.facts["count"] = len(rows)
    rep.facts["max_F"] = lhv_chsh_max()
    rep.facts["all_abs_F_equal_2"] = all(abs(r[-1]) == 2 for r in rows)
    return rep


def _parse_grid(text) -> list:
    if isinstance(text, (list, tuple)):
        vals = [float(x) for x in text]
    else:
        try:
            vals = [float(x) for x in str(text).split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad --epsilon-grid {text!r}") from None
    if not vals or any(not 0.0 <= v <= 1.0 for v in vals):
        raise UsageError("epsilon grid values must lie in [0, 1]")
    return vals


def cmd_bounds(args) -> Report:
    grid = _parse_grid(args.epsilon_grid) if args.epsilon_grid is not None else list(DEFAULT_GRID)
    rep = Report("causal CHSH bound by credence")
    rep.section("bound", ["epsilon", "bound"], [[e, mixture_chsh_bound(e)] for e in grid])
    rep.facts["threshold"] = float(args.threshold)
    rep.facts["break_even_epsilon"] = break_even_epsilon(args.threshold)
    return rep


def cmd_repro(args) -> Report:
    rep = Report("reproduction")
    smoke = smoking_gene()
    sp = smoke.problem
    rep.section(
        "smoking gene",
        ["action", "eu", "ceu"],
        [[a, evidential_eu(sp, a), causal_eu(sp, a)] for a in sp.actions],
    )
    rep.facts["smoking_bdt"] = prescribe(sp, Theory.BDT).choice
    rep.facts["smoking_cdt_for_all_p_gene"] = ",".join(
        sorted({prescribe(smoking_gene(g / 10).problem, Theory.CDT).choice for g in range(11)})
    )
    nc = newcomb_classic(0.99, 0.01).problem
    rep.section(
        "newcomb (0.99, 0.01)",
        ["action", "eu", "ceu"],
        [[a, evidential_eu(nc, a), causal_eu(nc, a)] for a in nc.actions],
    )
    mb = million_box(1_000_000, 0.999).problem
    rep.section(
        "million boxes (accuracy 0.999)",
        ["action", "eu", "ceu"],
        [[a, evidential_eu(mb, a), causal_eu(mb, a)] for a in mb.actions],
    )
    rep.facts["lhv_max_F"] = lhv_chsh_max()
    rep.facts["tsirelson_F"] = chsh_of_model(tsirelson_config())
    rep.facts["tsirelson_exact"] = TSIRELSON
    rep.section(
        "bound",
        ["epsilon", "bound"],
        [[e, mixture_chsh_bound(e)] for e in DEFAULT_GRID],
    )
    rep.facts["break_even_epsilon_at_2.8"] = break_even_epsilon(2.8)
    config = bg.GameConfig(n_pairs=args.pairs, threshold=args.threshold, seed=args.seed)
    agents = [bg.Agent(Theory.CDT, epsilon=args.epsilon), bg.Agent(Theory.BDT)]
    ledger = bg.run_tournament(config, agents, args.sessions)
    rep.section(
        f"tournament (N={config.n_pairs}, T={config.threshold:g}, {args.sessions} sessions)",
        ["agent", "plays", "wins", "total", "mean"],
        [[n, s["plays"], s["wins"], s["total"], s["mean"]] for n, s in ledger.summary().items()],
    )
    return rep


# -- argument handling -------------------------------------------------------

COMMANDS = {
    "scenario": cmd_scenario,
    "bell-game": cmd_bell_game,
    "enumerate-lhv": cmd_enumerate_lhv,
    "bounds": cmd_bounds,
    "repro": cmd_repro,
}

# per-command defaults applied after the config file
DEFAULTS = {
    "bell-game": dict(pairs=bg.DEFAULT_PAIRS, epsilon=0.1, threshold=bg.DEFAULT_THRESHOLD,
                      agent=["cdt"], semantics="expectation", mechanism="quantum",
                      sessions=100, seed=bg.DEFAULT_SEED),
    "bounds": dict(threshold=bg.DEFAULT_THRESHOLD),
    "repro": dict(pairs=bg.DEFAULT_PAIRS, epsilon=0.1, threshold=bg.DEFAULT_THRESHOLD,
                  sessions=100, seed=bg.DEFAULT_SEED),
}
COMMON = ("config", "format", "output", "output_dir", "command")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--config", help="flat JSON file of flag values")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--output-dir", help=f"directory for report files (default ${OUTPUT_DIR_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="newcomb-bell", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scenario", help="expected utilities and prescriptions for a named problem")
    p.add_argument("name", choices=tuple(SCENARIOS))
    p.add_argument("--p1", type=float, help="newcomb: P(O1|A1)")
    p.add_argument("--p2", type=float, help="newcomb: P(O1|A2)")
    p.add_argument("--prior", type=float, help="newcomb: causal prior that box 1 is full")
    p.add_argument("--p-gene", type=float, help="smoking-gene: prior P(G)")
    p.add_argument("--boxes", type=int, help="million-box: number of closed boxes")
    p.add_argument("--accuracy", type=float, help="million-box: predictor accuracy")
    _common(p)

    p = sub.add_parser("bell-game", help="run a seeded Bell-game tournament")
    p.add_argument("--pairs", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--agent", nargs="+", choices=("cdt", "bdt"))
    p.add_argument("--semantics", choices=tuple(s.value for s in bg.Semantics))
    p.add_argument("--mechanism", choices=tuple(m.value for m in bg.Mechanism))
    p.add_argument("--sessions", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sessions-csv", help="per-session CSV path")
    p.add_argument("--transcripts", help="directory for per-box session transcripts")
    _common(p)

    p = sub.add_parser("enumerate-lhv", help="list the 16 deterministic strategies")
    _common(p)

    p = sub.add_parser("bounds", help="causal CHSH bound over a credence grid")
    p.add_argument("--epsilon-grid", help="comma-separated credences")
    p.add_argument("--threshold", type=float)
    _common(p)

    p = sub.add_parser("repro", help="reproduce every headline number")
    p.add_argument("--pairs", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--sessions", type=int)
    p.add_argument("--seed", type=int)
    _common(p)
    return parser


def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        return action.choices[command]
    raise UsageError(f"unknown command {command!r}")


def _config_tokens(path, subparser) -> list:
    """Flag tokens equivalent to the flat JSON config at ``path``."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a flat JSON object")
    flags = {
        opt[2:].replace("-", "_"): opt
        for a in subparser._actions
        for opt in a.option_strings
        if opt.startswith("--")
    }
    tokens = []
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in flags or dest in COMMON:
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(value, dict):
            raise UsageError(f"config key {key!r} must not be nested")
        values = value if isinstance(value, list) else [value]
        tokens += [flags[dest], *(str(v) for v in values)]
    return tokens


def parse_args(argv=None) -> argparse.Namespace:
    """Parse ``argv``; config-file values are spliced in ahead of the flags."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        tokens = _config_tokens(args.config, _subparser(parser, args.command))
        i = argv.index(args.command)
        args = parser.parse_args(argv[: i + 1] + tokens + argv[i + 1 :])
    for key, value in DEFAULTS.get(args.command, {}).items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _emit(text: str, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = parse_args(argv)
        report = COMMANDS[args.command](args)
    except (UsageError, NewcombBellError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return 1

    text = report.render(args.format)
    ext = {"table": "txt", "csv": "csv", "json": "json"}[args.format]
    out_dir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV)
    if args.output:
        _emit(text, args.output)
    else:
        stdout.write(text)
    if out_dir:
        _emit(text, Path(out_dir) / f"{args.command}.{ext}")
    sessions = getattr(report, "sessions", None)
    if sessions is not None:
        r = Report("sessions").section("sessions", *sessions).render("csv")
        if args.sessions_csv:
            _emit(r, args.sessions_csv)
        if out_dir:
            _emit(r, Path(out_dir) / "bell-game-sessions.csv")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
