"""Command-line entry point wiring the pipeline end to end.

Subcommands: expand-lexicon, label, discover, sweep, synth.  A TOML file
passed with --config supplies defaults for any flag; explicit flags win.
Exit codes: 0 success, 2 usage or configuration problem, 3 malformed input
data, 4 internal invariant violation.  All outputs are deterministic for a
fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import corpus, experiment, labeling
from .citest import AlphaCISource, DatasetCITester
from .dataset import BinaryDataset, DatasetError
from .discovery import DiscoveryConfig, fci, pc
from .graphs import BackgroundKnowledge, GraphConstraintError, emit_dot, graph_to_json
from .lexicon import LexiconParseError, load_base_lexicon, expand_lexicon, save_lexicon
from .wordnet import WordNetParseError, parse_wordnet

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

_WORDNET_POS = ("noun", "verb", "adj", "adv")


class ConfigError(Exception):
    pass


def _packaged_lexicon():
    from importlib import resources

    return resources.files("testinj.data").joinpath("base_lexicon.tsv")


def _load_lexicon(path):
    if path is None:
        with _packaged_lexicon().open("r", encoding="utf-8") as fh:
            return load_base_lexicon(fh)
    if not os.path.exists(path):
        raise ConfigError(f"lexicon file not found: {path}")
    return load_base_lexicon(path)


def _wordnet_files(directory):
    if not os.path.isdir(directory):
        raise ConfigError(f"WordNet directory not found: {directory}")
    index_files, data_files = [], []
    for pos in _WORDNET_POS:
        index_path = os.path.join(directory, f"index.{pos}")
        data_path = os.path.join(directory, f"data.{pos}")
        if os.path.exists(index_path) and os.path.exists(data_path):
            index_files.append(index_path)
            data_files.append(data_path)
    if not index_files:
        raise ConfigError(f"no index.*/data.* pairs found under {directory}")
    return index_files, data_files


def _outdir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_expand_lexicon(args):
    lexicon = _load_lexicon(args.lexicon)
    index_files, data_files = _wordnet_files(args.wordnet)
    synonyms = parse_wordnet(index_files, data_files)
    expanded = expand_lexicon(lexicon, synonyms)
    out = _outdir(args)
    save_lexicon(expanded, os.path.join(out, "expanded_lexicon.tsv"))
    return EXIT_OK


def _read_all_records(args):
    paths = list(args.input or [])
    if args.manifest:
        paths.extend(corpus.read_manifest(args.manifest))
    if not paths:
        raise ConfigError("no input CSVs given (use --input or --manifest)")
    records = []
    for path in paths:
        if not os.path.exists(path):
            raise ConfigError(f"input file not found: {path}")
        records.extend(corpus.read_records(path))
    return records


def cmd_label(args):
    lexicon = _load_lexicon(args.lexicon)
    if args.wordnet:
        index_files, data_files = _wordnet_files(args.wordnet)
        lexicon = expand_lexicon(lexicon, parse_wordnet(index_files, data_files))
    records = _read_all_records(args)
    patients = corpus.build_patients(records)
    if not patients:
        raise DatasetError("no patients remain after filtering")
    policy = labeling.ThresholdPolicy(mode=args.threshold_mode, fraction=args.threshold_fraction)
    result = labeling.label_patients(
        patients,
        lexicon,
        policy,
        granularity=args.granularity,
        outcome_combination=args.outcome_combination,
    )
    out = _outdir(args)
    result.dataset.to_csv(os.path.join(out, "dataset.csv"))
    _write(os.path.join(out, "thresholds.json"), result.thresholds_json())
    _write(os.path.join(out, "rates.csv"), "\n".join(labeling.rates_csv_lines(result)) + "\n")
    return EXIT_OK


def _background_knowledge(args, dataset):
    if args.no_bk:
        return None
    if args.roots:
        roots = tuple(r.strip() for r in args.roots.split(",") if r.strip())
    else:
        roots = experiment.demographic_columns(dataset)
    leaf = args.leaf
    if leaf is None and experiment.OUTCOME in dataset.columns:
        leaf = experiment.OUTCOME
    for name in (*roots, *([leaf] if leaf else [])):
        if name not in dataset.columns:
            raise ConfigError(f"constrained column {name!r} not in dataset")
    if not roots and not leaf:
        return None
    return BackgroundKnowledge(roots=frozenset(roots), leaves=frozenset([leaf] if leaf else []))


def _discovery_config(args):
    return DiscoveryConfig(
        alpha=args.alpha,
        algorithm=args.algorithm,
        max_conditioning_size=args.max_cond_size,
        max_pdsep_size=args.max_pdsep_size,
        statistic=args.statistic,
    )


def cmd_discover(args):
    dataset = BinaryDataset.read_csv(args.data)
    config = _discovery_config(args)
    bk = _background_knowledge(args, dataset)
    tester = DatasetCITester(dataset, config.statistic)
    source = AlphaCISource(tester, config.alpha)
    algorithm = pc if config.algorithm == "pc" else fci
    graph, report = algorithm(source, config, bk, variables=dataset.columns)
    out = _outdir(args)
    _write(os.path.join(out, "graph.dot"), emit_dot(graph))
    _write(os.path.join(out, "graph.json"), graph_to_json(graph))
    payload = report.to_dict()
    payload["config"] = {
        "algorithm": config.algorithm,
        "alpha": config.alpha,
        "statistic": config.statistic,
        "max_conditioning_size": config.max_conditioning_size,
        "max_pdsep_size": config.max_pdsep_size,
        "roots": sorted(bk.roots) if bk else [],
        "leaves": sorted(bk.leaves) if bk else [],
    }
    _write(os.path.join(out, "report.json"), json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if args.trace:
        source.write_trace(os.path.join(out, "trace.csv"))
    return EXIT_OK


def cmd_sweep(args):
    dataset = BinaryDataset.read_csv(args.data)
    if args.double:
        dataset = experiment.double_data(dataset)
    grid = tuple(float(a) for a in args.grid.split(","))
    config = _discovery_config(args)
    bk = _background_knowledge(args, dataset)
    result = experiment.alpha_sweep(dataset, grid, config, bk)
    out = _outdir(args)
    _write(os.path.join(out, "sweep.json"), result.to_json())
    sys.stdout.write(result.table())
    return EXIT_OK


def cmd_synth(args):
    scm = experiment.paper_scenario_generator(args.seed)
    dataset = experiment.sample(scm, args.n, args.seed)
    out = _outdir(args)
    dataset.to_csv(os.path.join(out, "scenario.csv"))
    return EXIT_OK


def build_parser(defaults=None):
    parser = argparse.ArgumentParser(prog="testinj", description=__doc__)
    parser.add_argument("--config", help="TOML file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def finish(p):
        if defaults:
            p.set_defaults(**defaults)
        return p

    p = sub.add_parser("expand-lexicon", help="expand the base lexicon with stems and synonyms")
    p.add_argument("--lexicon", help="base lexicon TSV (default: packaged)")
    p.add_argument("--wordnet", required=True, help="directory of WordNet index.*/data.* files")
    p.add_argument("--out", default="out", help="output directory")
    finish(p).set_defaults(func=cmd_expand_lexicon)

    p = sub.add_parser("label", help="build the binary dataset from clinical record CSVs")
    p.add_argument("--input", action="append", help="records CSV (repeatable)")
    p.add_argument("--manifest", help="file listing record CSVs")
    p.add_argument("--lexicon", help="lexicon TSV (default: packaged base)")
    p.add_argument("--wordnet", help="expand the lexicon first using this WordNet directory")
    p.add_argument("--threshold-mode", choices=("percentile90", "maximum"), default="percentile90")
    p.add_argument("--threshold-fraction", type=float, default=0.10)
    p.add_argument("--granularity", choices=("fine", "coarse"), default="fine")
    p.add_argument("--outcome-combination", choices=("or", "and"), default="or")
    p.add_argument("--out", default="out")
    finish(p).set_defaults(func=cmd_label)

    for name, helptext in (("discover", "run PC or FCI on a binary dataset"), ("sweep", "alpha sweep")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--data", required=True, help="binary dataset CSV")
        p.add_argument("--algorithm", choices=("pc", "fci"), default="fci")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--statistic", choices=("g2", "chi2"), default="g2")
        p.add_argument("--max-cond-size", type=int, default=None)
        p.add_argument("--max-pdsep-size", type=int, default=4)
        p.add_argument("--roots", help="comma-separated root columns (default: demographic columns)")
        p.add_argument("--leaf", help="leaf column (default: is_testinj when present)")
        p.add_argument("--no-bk", action="store_true", help="disable background knowledge")
        p.add_argument("--out", default="out")
        if name == "discover":
            p.add_argument("--trace", action="store_true", help="write a CSV trace of all CI tests")
            finish(p).set_defaults(func=cmd_discover)
        else:
            p.add_argument("--grid", default=",".join(str(a) for a in experiment.DEFAULT_GRID))
            p.add_argument("--double", action="store_true", help="duplicate every row first")
            finish(p).set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="emit a sampled validation-scenario dataset")
    p.add_argument("--n", type=int, default=50000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="out")
    finish(p).set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    # a tiny first pass picks up --config so its values can become parser
    # defaults (explicit flags still win)
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    pre, _ = probe.parse_known_args(argv)
    defaults = None
    if pre.config:
        try:
            with open(pre.config, "rb") as fh:
                raw = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            print(f"error: cannot read config {pre.config}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        defaults = {k.replace("-", "_"): v for k, v in raw.items()}
    parser = build_parser(defaults)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GraphConstraintError, ValueError) as exc:
        if isinstance(exc, (LexiconParseError, WordNetParseError, corpus.CorpusError, DatasetError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # internal invariant violation
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
