"""Command line entry point.

    pyaxiology [--seed N] [--config FILE] [-v] COMMAND ...

Every file written gets a `<file>.meta.json` sidecar holding the tool version, the command, the seed and the SHA-256 of
every input. Exit status is 0 on success, 2 on usage errors and 3 on data or operation errors.
"""
from __future__ import annotations
import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable, Optional, Sequence
from . import __version__
from .abstract import Serializable
from .common import ModelMode, ValueDimension
from .curation.annotation import agreement_report, aggregate_annotations, make_augmented
from .curation.associations import AssociationClient, AssociationConfig, expand_lexicon_associations
from .curation.dataset import DEFAULT_RATIOS, corpus_stats, label_distribution, make_balanced, split_dataset
from .curation.embedding import EmbeddingTable, ExpansionReport, expand_lexicon_embedding
from .curation.io import ColumnMapping, read_annotations, read_samples, read_samples_csv, read_scenarios, write_samples
from .curation.lexicon import Lexicon, match_scenario
from .errors import PyaxiologyError, RejectedInputError
from .model.evaluate import evaluate
from .model.tokenizer import TokenizerConfig
from .model.train import TrainConfig, train
from .model.value_model import ValueModel, predict_vector
from .reward.dialogue import DialogueTrace, PersonaProfile, reward, rerank_candidates
from .reward.export import format_profile, format_trace, plot_data, profile_to_dict, trace_to_dict
from .reward.profile import Aggregation, profile_speaker
from . import serve as service
from .serve import RemoteScorer, ServeConfig
from .util import PathLike, atomic_write_text, dump_json, func_params, sha256_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class UsageError(PyaxiologyError):
    """The command line is well-formed but cannot be acted on."""


def _params(function: Callable, *exclude: str) -> tuple[str, ...]:
    return tuple(p for p in func_params(function) if p not in exclude)


# Config sections backed by a Serializable class.
CONFIG_CLASSES = {
    "tokenizer": TokenizerConfig,
    "train": TrainConfig,
    "serve": ServeConfig,
    "associations": AssociationConfig,
    "csv_columns": ColumnMapping,
}

# Config sections holding operation parameters. Allowed keys are the operation's own parameter names.
CONFIG_PARAMS = {
    "expand": _params(expand_lexicon_embedding, "lexicon", "table", "report"),
    "aggregate": _params(aggregate_annotations, "annotations", "dropped"),
    "augment": _params(make_augmented, "annotations"),
    "split": _params(split_dataset, "samples", "seed"),
    "balance": _params(make_balanced, "samples", "seed"),
    "model": _params(ValueModel.__init__, "mode", "tokenizer", "seed"),
    "reward": _params(reward, "persona", "trace", "value_fn"),
    "profile": _params(profile_speaker, "utterances", "value_fn"),
}


@dataclass
class CliConfig(Serializable):
    """Global options and per-command parameter groups.

    Args:
        seed (int): Seed of every randomized command. Default: 0.
        verbose (int): 0 warnings, 1 info, 2 debug.
        sections (dict): Parameter groups read from a config file, by section name.
    """

    seed: int = 0
    verbose: int = 0
    sections: dict = field(default_factory=dict)

    @classmethod
    def load(cls, filename: PathLike) -> CliConfig:
        """Read a JSON config file: {"seed": ..., "<section>": {...}, ...}.

        Raises:
            RejectedInputError: On unknown sections or keys.
        """
        with open(filename, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as err:
                raise RejectedInputError(f"{filename}: invalid JSON: {err.msg}") from err
        if not isinstance(data, dict):
            raise RejectedInputError(f"{filename}: config must be a JSON object")
        config = cls(seed=data.pop("seed", 0), verbose=data.pop("verbose", 0))
        for name, section in data.items():
            if not isinstance(section, dict):
                raise RejectedInputError(f"Config section '{name}' must be an object", field=name)
            if name in CONFIG_CLASSES:
                CONFIG_CLASSES[name].from_dict(section, strict=True)
            elif name in CONFIG_PARAMS:
                for key in section:
                    if key not in CONFIG_PARAMS[name]:
                        raise RejectedInputError(f"Unknown key '{key}' in config section '{name}'", field=key)
            else:
                raise RejectedInputError(f"Unknown config section '{name}'", field=name)
            config.sections[name] = section
        return config

    def section(self, name: str) -> dict:
        return dict(self.sections.get(name, {}))

    def build(self, name: str, **overrides):
        """Instantiate a config class from its section, flags given as non-None overrides taking precedence."""
        values = self.section(name)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return CONFIG_CLASSES[name].from_dict(values, strict=True)

    def value(self, name: str, key: str, flag, default):
        """Flag if given, else the config file value, else the default."""
        if flag is not None:
            return flag
        return self.section(name).get(key, default)


class Run:
    """State of one command invocation: resolved config and the inputs read so far."""

    def __init__(self, args: argparse.Namespace, config: CliConfig):
        self.args = args
        self.config = config
        self.seed = args.seed if args.seed is not None else config.seed
        self.inputs = {}

    def read(self, path: PathLike) -> Path:
        """Register an input file so its checksum lands in output metadata."""
        path = Path(path)
        if not path.is_file():
            raise UsageError(f"Input file not found: {path}")
        self.inputs[str(path)] = sha256_file(path)
        return path

    def write_meta(self, output: PathLike, counts: dict = None):
        meta = {
            "tool": "pyaxiology",
            "version": __version__,
            "command": self.args.command_name,
            "seed": self.seed,
            "inputs": dict(sorted(self.inputs.items())),
            "counts": counts or {},
        }
        atomic_write_text(f"{output}.meta.json", dump_json(meta))

    def write_text(self, output: PathLike, text: str, counts: dict = None):
        atomic_write_text(output, text)
        self.write_meta(output, counts)

    def write_json(self, output: PathLike, obj, counts: dict = None):
        self.write_text(output, dump_json(obj), counts)

    def write_samples(self, output: PathLike, samples, extra: dict = None):
        write_samples(output, samples)
        counts = {"samples": len(samples), "labels": label_distribution(samples)}
        counts.update(extra or {})
        self.write_meta(output, counts)

    def lexicon(self) -> Lexicon:
        path = getattr(self.args, "lexicon", None)
        return Lexicon.load(self.read(path)) if path else Lexicon.default()

    def samples(self, path: PathLike) -> list:
        path = self.read(path)
        if path.suffix.lower() == ".csv":
            return read_samples_csv(path, self.config.build("csv_columns"))
        return read_samples(path)

    def texts(self, path: PathLike) -> list[str]:
        return [s.text for s in read_scenarios(self.read(path))]

    def value_fn(self) -> Callable:
        if getattr(self.args, "endpoint", None):
            return RemoteScorer(self.args.endpoint)
        if not getattr(self.args, "model", None):
            raise UsageError("Either --model or --endpoint is required")
        return partial(predict_vector, ValueModel.load(self.read(self.args.model)))


# curate


def cmd_match(run: Run) -> int:
    lexicon = run.lexicon()
    scenarios = read_scenarios(run.read(run.args.scenarios))
    lines = []
    matched = 0
    for s in scenarios:
        dims = sorted(match_scenario(s.text, lexicon), key=lambda d: d.value)
        matched += bool(dims)
        record = {"id": s.id, "scenario": s.text, "dimension_codes": [d.code for d in dims]}
        lines.append(json.dumps(record, sort_keys=True, ensure_ascii=False))
    counts = {"scenarios": len(lines), "matched": matched}
    run.write_text(run.args.output, "".join(line + "\n" for line in lines), counts)
    return EXIT_OK


def cmd_expand(run: Run) -> int:
    lexicon = run.lexicon()
    table = EmbeddingTable.load(run.read(run.args.embeddings))
    k = run.config.value("expand", "k", run.args.k, 10)
    min_sim = run.config.value("expand", "min_sim", run.args.min_sim, 0.6)
    report = ExpansionReport()
    expanded = expand_lexicon_embedding(lexicon, table, k, min_sim, report)
    expanded.save(run.args.output)
    run.write_meta(
        run.args.output,
        {
            "added": {d.code: len(v) for d, v in sorted(report.added.items(), key=lambda kv: kv[0].value)},
            "missing": {d.code: v for d, v in sorted(report.missing.items(), key=lambda kv: kv[0].value)},
        },
    )
    return EXIT_OK


def cmd_associations(run: Run) -> int:
    lexicon = run.lexicon()
    client = AssociationClient(run.config.build("associations").with_environment())
    expanded = expand_lexicon_associations(lexicon, client)
    expanded.save(run.args.output)
    run.write_meta(
        run.args.output, {d.code: len(expanded[d].associated) for d in ValueDimension.ordered()}
    )
    return EXIT_OK


def cmd_aggregate(run: Run) -> int:
    annotations = read_annotations(run.read(run.args.annotations))
    min_agree = run.config.value("aggregate", "min_agree", run.args.min_agree, 3)
    dropped = []
    samples = aggregate_annotations(annotations, min_agree, dropped)
    records = []
    for group in dropped:
        vote, count, tied = group.mode()
        records.append(
            {
                "id": group.scenario.id,
                "dimension_code": group.dimension.code,
                "counts": dict(zip(("yes", "no", "unrelated"), group.counts())),
                "reason": "tie" if tied else f"fewer than {min_agree} agreeing votes",
            }
        )
    dropped_path = run.args.dropped or f"{run.args.output}.dropped.jsonl"
    run.write_samples(run.args.output, samples, {"dropped": len(dropped)})
    lines = [json.dumps(r, sort_keys=True, ensure_ascii=False) for r in records]
    run.write_text(dropped_path, "".join(line + "\n" for line in lines), {"dropped": len(dropped)})
    print(f"{len(samples)} samples, {len(dropped)} dropped groups")
    return EXIT_OK


def cmd_kappa(run: Run) -> int:
    report = agreement_report(read_annotations(run.read(run.args.annotations)))
    kappa = "undefined" if report.fleiss_kappa is None else f"{report.fleiss_kappa:.4f}"
    print(kappa)
    logger.info("raw agreement %.4f over %d items", report.raw_agreement, len(report.per_scenario_counts))
    if run.args.output:
        summary = {
            "fleiss_kappa": report.fleiss_kappa,
            "raw_agreement": report.raw_agreement,
            "items": report.per_scenario_counts,
        }
        run.write_json(run.args.output, summary, {"items": len(report.per_scenario_counts)})
    return EXIT_OK


def cmd_split(run: Run) -> int:
    samples = run.samples(run.args.samples)
    ratios = run.config.value("split", "ratios", run.args.ratios, DEFAULT_RATIOS)
    split = split_dataset(samples, ratios, run.seed)
    out = Path(run.args.out_dir)
    for name, part in split.parts().items():
        run.write_samples(out / f"{name}.jsonl", part)
    tokenizer = run.config.build("tokenizer")
    run.write_json(out / "stats.json", {"parts": corpus_stats(split, tokenizer), "labels": label_distribution(samples)})
    print("{} / {} / {}".format(*split.counts()))
    return EXIT_OK


def cmd_balance(run: Run) -> int:
    samples = run.samples(run.args.samples)
    code = run.config.value("balance", "dimension", run.args.dimension, ValueDimension.BENEVOLENCE.code)
    dimension = code if isinstance(code, ValueDimension) else ValueDimension.from_code(code)
    balanced = make_balanced(samples, run.seed, dimension)
    run.write_samples(run.args.output, balanced, {"removed": len(samples) - len(balanced)})
    return EXIT_OK


def cmd_augment(run: Run) -> int:
    annotations = read_annotations(run.read(run.args.annotations))
    min_agree = run.config.value("augment", "min_agree", run.args.min_agree, 3)
    run.write_samples(run.args.output, make_augmented(annotations, min_agree))
    return EXIT_OK


# model


def cmd_train(run: Run) -> int:
    samples = run.samples(run.args.train)
    config = run.config.build(
        "train",
        learning_rate=run.args.learning_rate,
        epochs=run.args.epochs,
        batch_size=run.args.batch_size,
        l2=run.args.l2,
        mode=run.args.mode,
        seed=run.seed,
    )
    model_params = run.config.section("model")
    if run.args.hash_dim is not None:
        model_params["hash_dim"] = run.args.hash_dim
    if run.args.embed_dim is not None:
        model_params["embed_dim"] = run.args.embed_dim
    tokenizer = run.config.build("tokenizer", ngram_order=run.args.ngram_order)
    model = ValueModel(mode=config.mode, tokenizer=tokenizer, seed=run.seed, **model_params)
    result = train(model, samples, config)
    model.save(run.args.output)
    run.write_meta(run.args.output, {"samples": len(samples), "epochs": config.epochs, "train": dict(config)})
    losses = run.args.losses or f"{run.args.output}.loss.txt"
    result.save_losses(losses)
    run.write_meta(losses, {"epochs": len(result.losses)})
    return EXIT_OK


def cmd_eval(run: Run) -> int:
    model = ValueModel.load(run.read(run.args.model))
    samples = run.samples(run.args.samples)
    report = evaluate(model, samples)
    counts = {"samples": len(samples)}
    if run.args.output:
        run.write_text(run.args.output, report.to_text(), counts)
    else:
        sys.stdout.write(report.to_text())
    if run.args.json:
        run.write_json(run.args.json, report.to_dict(), counts)
    return EXIT_OK


def cmd_score(run: Run) -> int:
    if run.args.input == "-":
        content = sys.stdin.read()
        run.inputs["<stdin>"] = hashlib.sha256(content.encode("utf-8")).hexdigest()
        texts = [line.strip() for line in content.splitlines() if line.strip()]
    else:
        texts = run.texts(run.args.input)
    if not texts:
        raise UsageError("No texts to score")
    fn = run.value_fn()
    lines = [json.dumps({"text": t, "vector": fn(t).to_list()}, ensure_ascii=False, sort_keys=True) for t in texts]
    run.write_text(run.args.output, "".join(line + "\n" for line in lines), {"texts": len(texts)})
    return EXIT_OK


# reward


def cmd_profile(run: Run) -> int:
    utterances = run.texts(run.args.utterances)
    aggregation = Aggregation(run.config.value("profile", "aggregation", run.args.aggregation, "mean"))
    profile = profile_speaker(utterances, run.value_fn(), aggregation)
    counts = {"utterances": len(utterances)}
    run.write_text(run.args.output, format_profile(profile), counts)
    run.write_text(run.args.plot_data or f"{run.args.output}.plot.tsv", plot_data(profile), counts)
    if run.args.json:
        run.write_json(run.args.json, profile_to_dict(profile), counts)
    return EXIT_OK


def _clamp(run: Run) -> bool:
    return bool(run.config.value("reward", "clamp_terms", True if run.args.clamp_terms else None, False))


def cmd_reward(run: Run) -> int:
    persona = run.texts(run.args.persona)
    utterances = run.texts(run.args.utterances)
    R, result = reward(persona, utterances, run.value_fn(), clamp_terms=_clamp(run))
    counts = {"persona": len(persona), "utterances": len(utterances)}
    run.write_text(run.args.output, format_trace(result, utterances), counts)
    if run.args.json:
        run.write_json(run.args.json, trace_to_dict(result, utterances), counts)
    print(repr(R))
    return EXIT_OK


def cmd_rerank(run: Run) -> int:
    fn = run.value_fn()
    persona = PersonaProfile.build(run.texts(run.args.persona), fn)
    prior = DialogueTrace.build(run.texts(run.args.prior), fn) if run.args.prior else DialogueTrace()
    candidates = run.texts(run.args.candidates)
    ranked = rerank_candidates(persona, prior, candidates, fn, clamp_terms=_clamp(run))
    lines = ["score\tindex\tcandidate"] + [f"{c.score!r}\t{c.index}\t{c.text}" for c in ranked]
    run.write_text(run.args.output, "\n".join(lines) + "\n", {"candidates": len(candidates)})
    return EXIT_OK


def cmd_serve(run: Run) -> int:
    config = run.config.build(
        "serve",
        host=run.args.host,
        port=run.args.port,
        model_path=run.args.model,
        max_body_bytes=run.args.max_body_bytes,
        max_concurrency=run.args.max_concurrency,
    )
    config.validate()
    service.run(config)
    return EXIT_OK


def _add_output(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("-o", "--output", required=required, help="Output file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pyaxiology", description="Human value modeling toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="Seed of randomized steps (default: config or 0)")
    parser.add_argument("--config", default=None, help="JSON config file with per-command sections")
    parser.add_argument("-v", "--verbose", action="count", default=None, help="-v info, -vv debug")
    commands = parser.add_subparsers(dest="command", required=True)

    curate = commands.add_parser("curate", help="Dataset curation steps")
    steps = curate.add_subparsers(dest="step", required=True)

    p = steps.add_parser("match", help="Match scenarios to values with the keyword lexicon")
    p.add_argument("--scenarios", required=True, help="Text file, one scenario per line")
    p.add_argument("--lexicon", help="Lexicon file (default: built-in lexicon)")
    _add_output(p)
    p.set_defaults(func=cmd_match)

    p = steps.add_parser("expand", help="Add embedding neighbors to the lexicon")
    p.add_argument("--lexicon", help="Lexicon file (default: built-in lexicon)")
    p.add_argument("--embeddings", required=True, help="Word vector text file")
    p.add_argument("--k", type=int, default=None, help="Neighbors per keyword (default 10)")
    p.add_argument("--min-sim", type=float, default=None, help="Minimum cosine similarity (default 0.6)")
    _add_output(p)
    p.set_defaults(func=cmd_expand)

    p = steps.add_parser("associations", help="Add word associations from the association service to the lexicon")
    p.add_argument("--lexicon", help="Lexicon file (default: built-in lexicon)")
    _add_output(p)
    p.set_defaults(func=cmd_associations)

    p = steps.add_parser("aggregate", help="Aggregate raw votes into labeled samples")
    p.add_argument("--annotations", required=True, help="Raw annotation records")
    p.add_argument("--min-agree", type=int, default=None, help="Votes needed to keep a group (default 3)")
    p.add_argument("--dropped", help="Dropped-group report (default: <output>.dropped.jsonl)")
    _add_output(p)
    p.set_defaults(func=cmd_aggregate)

    p = steps.add_parser("kappa", help="Print Fleiss' kappa of raw votes")
    p.add_argument("--annotations", required=True, help="Raw annotation records")
    _add_output(p, required=False)
    p.set_defaults(func=cmd_kappa)

    p = steps.add_parser("split", help="Stratified train / valid / test split")
    p.add_argument("--samples", required=True, help="Sample records, or a .csv file read with the csv_columns config")
    p.add_argument("--ratios", type=float, nargs=3, default=None, metavar=("TRAIN", "VALID", "TEST"))
    p.add_argument("--out-dir", required=True, help="Directory receiving train/valid/test.jsonl and stats.json")
    p.set_defaults(func=cmd_split)

    p = steps.add_parser("balance", help="Subsample the negative and neutral samples of one value")
    p.add_argument("--samples", required=True, help="Sample records")
    p.add_argument("--dimension", default=None, help="Value code (default BEN)")
    _add_output(p)
    p.set_defaults(func=cmd_balance)

    p = steps.add_parser("augment", help="Keep every vote group, relabeling low-agreement groups as unrelated")
    p.add_argument("--annotations", required=True, help="Raw annotation records")
    p.add_argument("--min-agree", type=int, default=None, help="Votes needed to keep a label (default 3)")
    _add_output(p)
    p.set_defaults(func=cmd_augment)

    p = commands.add_parser("train", help="Train a value model")
    p.add_argument("--train", required=True, help="Training samples")
    p.add_argument("--mode", choices=[m.value for m in ModelMode], default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None, help="0 for full-batch updates")
    p.add_argument("--l2", type=float, default=None)
    p.add_argument("--hash-dim", type=int, default=None)
    p.add_argument("--embed-dim", type=int, default=None)
    p.add_argument("--ngram-order", type=int, default=None)
    p.add_argument("--losses", help="Loss trace file (default: <output>.loss.txt)")
    _add_output(p)
    p.set_defaults(func=cmd_train)

    p = commands.add_parser("eval", help="Evaluate a value model")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--json", help="Also write the report as JSON")
    _add_output(p, required=False)
    p.set_defaults(func=cmd_eval)

    p = commands.add_parser("score", help="Score texts with a value model")
    p.add_argument("--model")
    p.add_argument("--endpoint", help="Base URL of a running service, used instead of --model")
    p.add_argument("--input", default="-", help="Text file, one text per line (default: standard input)")
    _add_output(p)
    p.set_defaults(func=cmd_score)

    p = commands.add_parser("profile", help="Value profile of a speaker")
    p.add_argument("--model")
    p.add_argument("--endpoint", help="Base URL of a running service, used instead of --model")
    p.add_argument("--utterances", required=True, help="Text file, one utterance per line")
    p.add_argument("--aggregation", choices=[a.value for a in Aggregation], default=None)
    p.add_argument("--plot-data", help="Radar plot data file (default: <output>.plot.tsv)")
    p.add_argument("--json", help="Also write the profile as JSON")
    _add_output(p)
    p.set_defaults(func=cmd_profile)

    p = commands.add_parser("reward", help="Value matching reward of a dialogue against a persona")
    p.add_argument("--model")
    p.add_argument("--endpoint", help="Base URL of a running service, used instead of --model")
    p.add_argument("--persona", required=True, help="Text file, one persona sentence per line")
    p.add_argument("--utterances", required=True, help="Text file, one utterance per line")
    p.add_argument("--clamp-terms", action="store_true", help="Clamp every term to [-1, 1]")
    p.add_argument("--json", help="Also write the trace as JSON")
    _add_output(p)
    p.set_defaults(func=cmd_reward)

    p = commands.add_parser("rerank", help="Order candidate replies by reward gain")
    p.add_argument("--model")
    p.add_argument("--endpoint", help="Base URL of a running service, used instead of --model")
    p.add_argument("--persona", required=True, help="Text file, one persona sentence per line")
    p.add_argument("--prior", help="Text file with the dialogue so far")
    p.add_argument("--candidates", required=True, help="Text file, one candidate per line")
    p.add_argument("--clamp-terms", action="store_true", help="Clamp every term to [-1, 1]")
    _add_output(p)
    p.set_defaults(func=cmd_rerank)

    p = commands.add_parser("serve", help="Run the scoring service until interrupted")
    p.add_argument("--model", default=None)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--max-body-bytes", type=int, default=None)
    p.add_argument("--max-concurrency", type=int, default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def _configure_logging(verbose: int):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run a command and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit:
        return exit.code
    args.command_name = " ".join(filter(None, (args.command, getattr(args, "step", None))))
    try:
        config = CliConfig.load(args.config) if args.config else CliConfig()
    except (RejectedInputError, OSError) as err:
        print(f"pyaxiology: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(args.verbose if args.verbose is not None else config.verbose)
    try:
        return args.func(Run(args, config))
    except UsageError as err:
        print(f"pyaxiology: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (PyaxiologyError, ValueError, OSError) as err:
        logger.debug("command failed", exc_info=True)
        print(f"pyaxiology: error: {err}", file=sys.stderr)
        return EXIT_DATA
