"""Command-line entry point.

Exit status is 0 on success, 1 on a usage error and 2 on a data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import io
from .analysis import analyze, to_dot
from .constructions import construct_hypercube, construct_parity
from .cover import fundamental_number_exact, fundamental_number_greedy
from .errors import PairsepError
from .fewshot import EpisodeConfig, best_worst_pair_sets, run_episodes
from .heads import DEFAULT_EPS, HeadBank, TrainConfig, build_bank
from .metrics import RunRecord, build_table
from .poset import separable_set
from .separability import head_separable_sets, separability_report
from .synth import GaussianSpec, generate

USAGE, DATA = 1, 2


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def eps_type(text: str) -> float:
    try:
        eps = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < eps < 0.5:
        raise argparse.ArgumentTypeError(f"eps must lie strictly between 0 and 0.5, got {eps}")
    return eps


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _names(text):
    return [t for t in text.split(",") if t] if text else None


def _emit(doc, path):
    if path:
        io.write_json(doc, path)


# -- subcommands -------------------------------------------------------------

def cmd_construct(args):
    if args.hypercube is not None:
        models = construct_hypercube(args.hypercube)
        n = 1 << args.hypercube
    else:
        if args.parity < 4 or args.parity % 2:
            raise UsageError(f"--parity needs an even N >= 4, got {args.parity}")
        models = list(construct_parity(args.parity).values())
        n = args.parity
    io.write_json(io.models_to_json(models, n), args.output or "-")


def cmd_synth(args):
    spec = GaussianSpec.from_json(io.read_json(args.spec))
    io.write_features(generate(spec), args.output, source=f"synthetic gaussian seed={spec.seed}")
    print(f"wrote {len(spec.names)} classes x {spec.samples} samples to {args.output}")


def cmd_train_heads(args):
    features = io.load_features(args.features)
    if args.classes:
        features = features.subset(_names(args.classes))
    cfg = TrainConfig(args.lr, args.iterations, args.l2, args.seed, args.standardize)
    bank = build_bank(features, cfg)
    doc = bank.to_json()
    doc["provenance"] = io.provenance(asdict(cfg), args.deterministic,
                                      features=str(args.features))
    io.write_json(doc, args.output)
    print(f"trained {len(bank.heads)} heads on {len(bank.classes)} classes")


def _report(args):
    features = io.load_features(args.features)
    if getattr(args, "eval_classes", None):
        features = features.subset(_names(args.eval_classes))
    bank = HeadBank.from_json(io.read_json(args.bank))
    return separability_report(features, bank, args.eps), bank


def cmd_separability(args):
    report, bank = _report(args)
    report.provenance = io.provenance(bank.config, args.deterministic, eps=args.eps,
                                      features=str(args.features), bank=str(args.bank))
    doc = report.to_json()
    if args.run_id is not None:
        doc = RunRecord(args.run_id, list(bank.classes), report, args.stage).to_json()
    _emit(doc, args.output)
    if args.csv:
        io.atomic_write(args.csv, report.to_csv())
    print(f"separability {report.score} / {len(report.rows)} (eps={args.eps})")


def _candidates(args):
    """Separable sets, labels and class names from models or a bank."""
    if args.bank:
        if not args.features:
            raise UsageError("--bank requires --features")
        report, _ = _report(args)
        sets, labels = head_separable_sets(report)
        return sets, labels, report.classes, {"eps": args.eps}
    if args.bank is None and args.features:
        raise UsageError("--features requires --bank")
    models, n, names = io.models_from_json(io.read_json(args.models))
    try:
        sets = [separable_set(m, n) for m in models]
    except PairsepError as exc:
        raise type(exc)(f"model list: {exc}") from exc
    return sets, [m.label for m in models], names, {}


def cmd_fundamental(args):
    sets, _, _, _ = _candidates(args)
    n = sets[0].n
    if args.greedy:
        print(fundamental_number_greedy(sets, n))
    else:
        print(fundamental_number_exact(sets, n, max_candidates=args.max_candidates))


def cmd_poset(args):
    sets, labels, names, extra = _candidates(args)
    report = analyze(sets, labels, exact=not args.greedy, class_names=names,
                     max_candidates=args.max_candidates)
    report.provenance = io.provenance(None, args.deterministic, **extra)
    _emit(report.to_json(), args.output)
    if args.dot:
        io.atomic_write(args.dot, to_dot(report))
    print(f"{len(report.equivalence_classes)} equivalence classes, "
          f"{len(report.hasse_edges)} Hasse edges, "
          f"fundamental number {report.fundamental_number} "
          f"(bounds {report.lower_bound}..{report.upper_bound})")


def cmd_metrics(args):
    runs = []
    for path in args.runs:
        doc = io.read_json(path)
        docs = doc["runs"] if isinstance(doc, dict) and "runs" in doc else doc
        for d in docs if isinstance(docs, list) else [docs]:
            runs.append(RunRecord.from_json(d))
    table = build_table(runs, args.eps)
    table.provenance = io.provenance(None, args.deterministic, eps=args.eps,
                                     runs=[str(p) for p in args.runs])
    _emit(table.to_json(), args.output)
    if args.csv:
        io.atomic_write(args.csv, table.to_csv())
    print(table.summary())


def cmd_fewshot(args):
    features = io.load_features(args.features)
    cfg = EpisodeConfig(args.ways, args.shots, args.queries, args.normalize)
    pool = None
    sets_doc = None
    if args.pool != "all":
        if not args.bank:
            raise UsageError("--pool best|worst requires --bank")
        bank = HeadBank.from_json(io.read_json(args.bank))
        sets = best_worst_pair_sets(bank, features, args.eps, args.k)
        pool = sets.best if args.pool == "best" else sets.worst
        sets_doc = sets.to_json(features.names)
    stats = run_episodes(features, cfg, args.runs, args.seed, pool)
    doc = stats.to_json()
    doc["pool"] = args.pool
    doc["pair_sets"] = sets_doc
    doc["provenance"] = io.provenance(asdict(cfg), args.deterministic, seed=args.seed,
                                      eps=args.eps, k=args.k)
    _emit(doc, args.output)
    print(f"accuracy {stats.mean:.4f} +/- {stats.ci95:.4f} over {stats.runs} runs "
          f"(pool={args.pool})")


# -- parser ------------------------------------------------------------------

def build_parser() -> Parser:
    common = Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="report errors as JSON")
    common.add_argument("--deterministic", action="store_true",
                        help="omit timestamps so reruns are byte-identical")

    p = Parser(prog="pairsep", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    s = sub.add_parser("construct", parents=[common], help="bound-attaining model lists")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--hypercube", type=positive_int, metavar="K")
    g.add_argument("--parity", type=int, metavar="N")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("synth", parents=[common], help="Gaussian spec -> feature CSV")
    s.add_argument("spec")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("train-heads", parents=[common], help="features -> head bank")
    s.add_argument("features")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--classes", help="comma-separated training classes (default: all)")
    s.add_argument("--lr", type=float, default=TrainConfig.learning_rate)
    s.add_argument("--iterations", type=positive_int, default=TrainConfig.iterations)
    s.add_argument("--l2", type=float, default=TrainConfig.l2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--standardize", action="store_true")
    s.set_defaults(func=cmd_train_heads)

    s = sub.add_parser("separability", parents=[common], help="score a bank on features")
    s.add_argument("features")
    s.add_argument("--bank", required=True)
    s.add_argument("--eps", type=eps_type, default=DEFAULT_EPS)
    s.add_argument("--eval-classes", help="comma-separated evaluated classes (default: all)")
    s.add_argument("-o", "--output")
    s.add_argument("--csv")
    s.add_argument("--run-id", help="wrap the report in a run record")
    s.add_argument("--stage", choices=("pre", "post"), default="pre")
    s.set_defaults(func=cmd_separability)

    for name, func, helptext in (("poset", cmd_poset, "order analysis + DOT"),
                                 ("fundamental", cmd_fundamental, "fundamental number")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("models", nargs="?", default="-",
                       help="models JSON (default: stdin)")
        s.add_argument("--bank")
        s.add_argument("--features")
        s.add_argument("--eval-classes")
        s.add_argument("--eps", type=eps_type, default=DEFAULT_EPS)
        g = s.add_mutually_exclusive_group()
        g.add_argument("--exact", action="store_true", default=True)
        g.add_argument("--greedy", action="store_true")
        s.add_argument("--max-candidates", type=positive_int, default=25)
        if name == "poset":
            s.add_argument("-o", "--output")
            s.add_argument("--dot")
        s.set_defaults(func=func)

    s = sub.add_parser("metrics", parents=[common], help="run records -> metric table")
    s.add_argument("runs", nargs="+")
    s.add_argument("--eps", type=eps_type, default=DEFAULT_EPS)
    s.add_argument("-o", "--output")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("fewshot", parents=[common], help="NCM few-shot episodes")
    s.add_argument("features")
    s.add_argument("--bank")
    s.add_argument("--ways", type=positive_int, default=2)
    s.add_argument("--shots", type=positive_int, default=1)
    s.add_argument("--queries", type=positive_int, default=15)
    s.add_argument("--runs", type=positive_int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pool", choices=("best", "worst", "all"), default="all")
    s.add_argument("--k", type=positive_int, default=3)
    s.add_argument("--eps", type=eps_type, default=DEFAULT_EPS)
    s.add_argument("--normalize", action="store_true", help="L2-normalise features first")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_fewshot)
    return p


def _fail(code: int, kind: str, message: str, as_json: bool) -> int:
    if as_json:
        sys.stderr.write(json.dumps({"error": kind, "message": message, "exit": code}) + "\n")
    else:
        sys.stderr.write(f"error: {message}\n")
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        return _fail(USAGE, "usage", str(exc), as_json)
    except PairsepError as exc:
        return _fail(DATA, type(exc).__name__, str(exc), as_json)
    except BrokenPipeError:
        return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
