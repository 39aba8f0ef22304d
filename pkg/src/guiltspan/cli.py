"""Command-line entry point wiring the pipeline stages together.

Config precedence: explicit flags > --config file section > defaults. Every
artifact-producing command validates its inputs first, writes its outputs,
and emits exactly one manifest JSON next to them. Exit codes: 0 success,
1 unexpected error, 2 usage error, 3 missing input, 4 schema/validation
error.
"""

import csv
import json
import sys
from pathlib import Path

import click

from .annotations import (
    Session,
    SessionStore,
    aggregate_corpus,
    exclude_participants,
    exclude_stories,
)
from .annotations.types import AggregatedStory
from .corpus import RawStory, filter_archive, split_corpus
from .corpus.types import Story
from .io import read_json, read_jsonl, write_json, write_jsonl
from .manifest import emit_manifest

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_MISSING_INPUT = 3
EXIT_SCHEMA = 4


class MissingInput(click.ClickException):
    exit_code = EXIT_MISSING_INPUT


class SchemaError(click.ClickException):
    exit_code = EXIT_SCHEMA


def _require_file(path, name: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise MissingInput(f"{name} not found: {p}")
    return p


def _load_stories(path) -> list[Story]:
    try:
        return [Story.from_dict(d) for d in read_jsonl(path)]
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"bad story record in {path}: {exc}") from exc


def _load_sessions(path) -> list[Session]:
    try:
        return [Session.from_dict(d) for d in read_jsonl(path)]
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"bad session record in {path}: {exc}") from exc


def _load_aggregated(path) -> list[AggregatedStory]:
    try:
        return [AggregatedStory.from_dict(d) for d in read_jsonl(path)]
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"bad aggregated record in {path}: {exc}") from exc


def _config_section(ctx, section: str) -> dict:
    cfg = ctx.obj.get("config_data", {})
    return cfg.get(section, {})


def resolve(ctx, section: str, **flag_values) -> dict:
    """flags > config-file section > defaults (the passed values)."""
    out = dict(flag_values)
    file_section = _config_section(ctx, section)
    for name, value in flag_values.items():
        src = ctx.get_parameter_source(name)
        explicit = src is not None and src.name == "COMMANDLINE"
        if not explicit and name in file_section:
            out[name] = file_section[name]
    return out


def _dry_run_exit(ctx, command: str, config: dict) -> None:
    if ctx.obj.get("dry_run"):
        click.echo(f"[dry-run] {command}: config valid")
        click.echo(json.dumps(config, sort_keys=True, indent=2))
        ctx.exit(EXIT_OK)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Global default seed.")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file with per-command sections.")
@click.option("--out-dir", type=click.Path(), default=None,
              help="Default output directory for commands that take one.")
@click.option("--dry-run", is_flag=True, help="Validate config and inputs, write nothing.")
@click.pass_context
def main(ctx, seed, config_path, out_dir, dry_run):
    """Crime-report guilt-rating toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["dry_run"] = dry_run
    ctx.obj["out_dir"] = out_dir
    ctx.obj["config_data"] = {}
    if config_path:
        p = _require_file(config_path, "config file")
        try:
            ctx.obj["config_data"] = read_json(p)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config file is not valid JSON: {exc}") from exc


# --------------------------------------------------------------------------
# corpus
# --------------------------------------------------------------------------

@main.group()
def corpus():
    """Curate the story corpus."""


@corpus.command("filter")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--report", "report_path", required=True, type=click.Path())
@click.option("--max-words", type=int, default=300, show_default=True)
@click.option("--min-stem-hits", type=int, default=4, show_default=True)
@click.option("--stem-mode", type=click.Choice(["occurrences", "distinct"]),
              default="occurrences", show_default=True)
@click.pass_context
def corpus_filter(ctx, in_path, out_path, report_path, max_words, min_stem_hits, stem_mode):
    """Scrub, filter, and tokenize a raw archive."""
    cfg = resolve(ctx, "corpus.filter", max_words=max_words,
                  min_stem_hits=min_stem_hits, stem_mode=stem_mode)
    src = _require_file(in_path, "archive")
    _dry_run_exit(ctx, "corpus filter", cfg)
    try:
        archive = [RawStory.from_dict(d) for d in read_jsonl(src)]
    except (KeyError, json.JSONDecodeError) as exc:
        raise SchemaError(f"bad archive record: {exc}") from exc
    try:
        stories, report = filter_archive(
            archive, max_words=cfg["max_words"], min_stem_hits=cfg["min_stem_hits"],
            stem_mode=cfg["stem_mode"],
        )
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    write_jsonl(out_path, (s.to_dict() for s in stories))
    write_json(report_path, report.to_dict())
    emit_manifest(Path(out_path).with_suffix(".manifest.json"), "corpus filter", cfg,
                  inputs={"archive": src},
                  outputs={"corpus": out_path, "report": report_path})
    click.echo(f"accepted {report.accepted}/{report.input_count} stories")


@corpus.command("split")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--ratios", default="0.8,0.1,0.1", show_default=True)
@click.option("--seed", type=int, default=None, help="Defaults to the global --seed.")
@click.option("--out-dir", "out_dir", type=click.Path(), default=None)
@click.pass_context
def corpus_split(ctx, in_path, ratios, seed, out_dir):
    """Partition a corpus into train/dev/test JSONL files."""
    seed = ctx.obj["seed"] if seed is None else seed
    out_dir = out_dir or ctx.obj.get("out_dir")
    if not out_dir:
        raise click.UsageError("--out-dir required")
    try:
        ratio_tuple = tuple(float(x) for x in ratios.split(","))
    except ValueError as exc:
        raise SchemaError(f"bad --ratios: {ratios}") from exc
    cfg = resolve(ctx, "corpus.split", ratios=ratios, seed=seed)
    src = _require_file(in_path, "corpus")
    _dry_run_exit(ctx, "corpus split", cfg)
    stories = _load_stories(src)
    try:
        parts = split_corpus(stories, ratio_tuple, seed=seed)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    names = ["train", "dev", "test"][: len(parts)] + [
        f"part{i}" for i in range(3, len(parts))
    ]
    outputs = {}
    for name, part in zip(names, parts):
        path = Path(out_dir) / f"{name}.jsonl"
        write_jsonl(path, (s.to_dict() for s in part))
        outputs[name] = path
    emit_manifest(Path(out_dir) / "split.manifest.json", "corpus split", cfg,
                  inputs={"corpus": src}, seeds={"split": seed}, outputs=outputs)
    click.echo("sizes: " + ", ".join(f"{n}={len(p)}" for n, p in zip(names, parts)))


# --------------------------------------------------------------------------
# annotations
# --------------------------------------------------------------------------

@main.group()
def annotations():
    """Ingest, exclude, and aggregate annotation sessions."""


@annotations.command("ingest")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--from-ui", is_flag=True,
              help="Convert 0-100 slider payloads to the stored [0,1] scale.")
@click.pass_context
def annotations_ingest(ctx, in_path, store_path, from_ui):
    """Validate session records and append them to a store."""
    cfg = resolve(ctx, "annotations.ingest", from_ui=from_ui)
    src = _require_file(in_path, "sessions")
    _dry_run_exit(ctx, "annotations ingest", cfg)
    store = SessionStore(store_path)
    known = store.session_ids()
    added = skipped = 0
    for rec in read_jsonl(src):
        if cfg["from_ui"]:
            for ann in rec.get("annotations", []):
                if ann.get("slider") is not None:
                    ann["slider"] = ann["slider"] / 100.0
            for ctrl in rec.get("control_responses", []):
                ctrl["slider"] = ctrl["slider"] / 100.0
        try:
            session = Session.from_dict(rec)
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad session record: {exc}") from exc
        if session.session_id in known:
            skipped += 1
            continue
        store.append(session)
        known.add(session.session_id)
        added += 1
    emit_manifest(Path(store_path).with_suffix(".manifest.json"), "annotations ingest",
                  cfg, inputs={"sessions": src}, outputs={"store": store_path})
    click.echo(f"ingested {added} sessions ({skipped} duplicates skipped)")


@annotations.command("exclude")
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--ledger", "ledger_path", required=True, type=click.Path())
@click.option("--min-duration", type=float, default=3.5, show_default=True)
@click.option("--max-control-errors", type=int, default=2, show_default=True)
@click.option("--da-threshold", type=float, default=0.30, show_default=True)
@click.pass_context
def annotations_exclude(ctx, stories_path, store_path, out_path, ledger_path,
                        min_duration, max_control_errors, da_threshold):
    """Apply participant and story exclusion rules; write kept sessions."""
    cfg = resolve(ctx, "annotations.exclude", min_duration=min_duration,
                  max_control_errors=max_control_errors, da_threshold=da_threshold)
    stories_file = _require_file(stories_path, "corpus")
    store_file = _require_file(store_path, "session store")
    _dry_run_exit(ctx, "annotations exclude", cfg)
    stories = _load_stories(stories_file)
    sessions = _load_sessions(store_file)
    kept_sessions, ledger = exclude_participants(
        sessions, min_duration=cfg["min_duration"],
        max_control_errors=cfg["max_control_errors"],
    )
    anns = [a for s in kept_sessions for a in s.annotations]
    kept_ids, ledger = exclude_stories(
        [s.id for s in stories], anns, threshold=cfg["da_threshold"], ledger=ledger
    )
    kept_id_set = set(kept_ids)
    filtered_sessions = []
    for s in kept_sessions:
        s_anns = [a for a in s.annotations if a.story_id in kept_id_set]
        filtered_sessions.append(
            Session(
                session_id=s.session_id, participant_id=s.participant_id,
                story_ids=s.story_ids, annotations=s_anns,
                duration_minutes=s.duration_minutes,
                control_responses=s.control_responses, self_report=s.self_report,
                native_language=s.native_language, demographics=s.demographics,
                submitted_at=s.submitted_at,
            )
        )
    write_jsonl(out_path, (s.to_dict() for s in filtered_sessions))
    write_json(ledger_path, ledger.to_dict())
    emit_manifest(Path(out_path).with_suffix(".manifest.json"), "annotations exclude",
                  cfg, inputs={"corpus": stories_file, "store": store_file},
                  outputs={"sessions": out_path, "ledger": ledger_path})
    click.echo(
        f"kept {ledger.sessions_kept}/{ledger.sessions_in} sessions, "
        f"{ledger.stories_kept}/{ledger.stories_in} stories"
    )


@annotations.command("aggregate")
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--sessions", "sessions_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def annotations_aggregate(ctx, stories_path, sessions_path, out_path):
    """Fold responses into per-story rating and token targets."""
    cfg = resolve(ctx, "annotations.aggregate")
    stories_file = _require_file(stories_path, "corpus")
    sessions_file = _require_file(sessions_path, "sessions")
    _dry_run_exit(ctx, "annotations aggregate", cfg)
    stories = _load_stories(stories_file)
    sessions = _load_sessions(sessions_file)
    anns = [a for s in sessions for a in s.annotations]
    aggregated = aggregate_corpus(stories, anns)
    aggregated = [a for a in aggregated if a.mean_rating]
    write_jsonl(out_path, (a.to_dict() for a in aggregated))
    emit_manifest(Path(out_path).with_suffix(".manifest.json"), "annotations aggregate",
                  cfg, inputs={"corpus": stories_file, "sessions": sessions_file},
                  outputs={"aggregated": out_path})
    click.echo(f"aggregated {len(aggregated)} stories")


# --------------------------------------------------------------------------
# stats
# --------------------------------------------------------------------------

@main.group()
def stats():
    """Agreement and highlighting statistics."""


def _stats_inputs(stories_path, sessions_path):
    stories_file = _require_file(stories_path, "corpus")
    sessions_file = _require_file(sessions_path, "sessions")
    stories = _load_stories(stories_file)
    sessions = _load_sessions(sessions_file)
    anns = [a for s in sessions for a in s.annotations]
    return stories_file, sessions_file, stories, anns


@stats.command("agreement")
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--sessions", "sessions_path", required=True, type=click.Path())
@click.option("--out-dir", "out_dir", type=click.Path(), default=None)
@click.option("--reps", type=int, default=20, show_default=True)
@click.option("--alpha-unit", type=click.Choice(["token", "character"]),
              default="token", show_default=True)
@click.option("--seed", type=int, default=None)
@click.pass_context
def stats_agreement(ctx, stories_path, sessions_path, out_dir, reps, alpha_unit, seed):
    """Rating agreement, shuffled baselines, alpha, chance rate, majority test."""
    from .stats import compute_agreement_report, write_agreement_csv

    seed = ctx.obj["seed"] if seed is None else seed
    out_dir = out_dir or ctx.obj.get("out_dir")
    if not out_dir:
        raise click.UsageError("--out-dir required")
    cfg = resolve(ctx, "stats.agreement", reps=reps, alpha_unit=alpha_unit, seed=seed)
    stories_file, sessions_file, stories, anns = _stats_inputs(stories_path, sessions_path)
    _dry_run_exit(ctx, "stats agreement", cfg)
    report = compute_agreement_report(
        stories, anns, seed=cfg["seed"], shuffle_reps=cfg["reps"],
        alpha_unit=cfg["alpha_unit"],
    )
    out = Path(out_dir)
    write_json(out / "agreement.json", report.to_dict())
    write_agreement_csv(report, out / "agreement.csv")
    _plot_rating_density(anns, out / "rating_density.png")
    emit_manifest(out / "agreement.manifest.json", "stats agreement", cfg,
                  inputs={"corpus": stories_file, "sessions": sessions_file},
                  seeds={"shuffle": cfg["seed"]},
                  outputs={"json": out / "agreement.json", "csv": out / "agreement.csv"})
    for q, mse in report.mean_story_mse.items():
        click.echo(f"{q}: mean story MSE {mse:.4f} "
                   f"(shuffled {report.shuffled_mean_mse[q]:.4f}, "
                   f"alpha {report.krippendorff_alpha[q]:.3f})")
    click.echo(f"chance highlight rate {report.chance_rate:.4f}")


@stats.command("highlights")
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--sessions", "sessions_path", required=True, type=click.Path())
@click.option("--out-dir", "out_dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.pass_context
def stats_highlights(ctx, stories_path, sessions_path, out_dir, seed):
    """Highlight lengths, chance rate, and the majority-agreement test."""
    from .annotations.spans import merge_highlights
    from .stats import chance_highlight_rate, majority_agreement_test

    seed = ctx.obj["seed"] if seed is None else seed
    out_dir = out_dir or ctx.obj.get("out_dir")
    if not out_dir:
        raise click.UsageError("--out-dir required")
    cfg = resolve(ctx, "stats.highlights", seed=seed)
    stories_file, sessions_file, stories, anns = _stats_inputs(stories_path, sessions_path)
    _dry_run_exit(ctx, "stats highlights", cfg)
    body_len = {s.id: len(s.body) for s in stories}
    out = Path(out_dir)
    with open(out / "highlight_lengths.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["question", "story_id", "char_length"])
        for a in sorted(anns, key=lambda a: (a.question.value, a.story_id)):
            if a.doesnt_apply or a.story_id not in body_len:
                continue
            for h in merge_highlights(a.highlights, body_len[a.story_id]):
                writer.writerow([a.question.value, a.story_id, h.char_end - h.char_start])
    majority = majority_agreement_test(stories, anns, seed=cfg["seed"])
    payload = {
        "chance_rate": chance_highlight_rate(stories, anns),
        "majority": majority.to_dict(),
    }
    write_json(out / "highlights.json", payload)
    emit_manifest(out / "highlights.manifest.json", "stats highlights", cfg,
                  inputs={"corpus": stories_file, "sessions": sessions_file},
                  seeds={"shuffle": cfg["seed"]},
                  outputs={"json": out / "highlights.json",
                           "lengths": out / "highlight_lengths.csv"})
    click.echo(f"chance rate {payload['chance_rate']:.4f}, "
               f"majority p {majority.p:.2e}")


@stats.command("words")
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--sessions", "sessions_path", required=True, type=click.Path())
@click.option("--out-dir", "out_dir", type=click.Path(), default=None)
@click.option("--min-freq", type=int, default=25, show_default=True)
@click.option("--top-k", type=int, default=30, show_default=True)
@click.pass_context
def stats_words(ctx, stories_path, sessions_path, out_dir, min_freq, top_k):
    """Per-word highlight proportions, top table, question differences."""
    from .stats import (
        highlight_frequency_correlation,
        question_difference_table,
        top_highlighted,
        word_stats,
        write_word_stats_csv,
    )

    out_dir = out_dir or ctx.obj.get("out_dir")
    if not out_dir:
        raise click.UsageError("--out-dir required")
    cfg = resolve(ctx, "stats.words", min_freq=min_freq, top_k=top_k)
    stories_file, sessions_file, stories, anns = _stats_inputs(stories_path, sessions_path)
    _dry_run_exit(ctx, "stats words", cfg)
    ws = word_stats(stories, anns, min_freq=cfg["min_freq"])
    out = Path(out_dir)
    write_word_stats_csv(ws, out / "word_stats.csv")
    write_word_stats_csv(top_highlighted(ws, cfg["top_k"]), out / "top_highlighted.csv")
    with open(out / "question_difference.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "frequency", "reader_perception", "author_belief",
                         "difference"])
        for row in question_difference_table(ws):
            writer.writerow([row["word"], row["frequency"],
                             f"{row['reader_perception']:.6f}",
                             f"{row['author_belief']:.6f}", f"{row['difference']:.6f}"])
    if len(ws) >= 2:
        r = highlight_frequency_correlation(ws)
        write_json(out / "word_stats_summary.json",
                   {"n_words": len(ws), "highlight_frequency_pearson_r": r})
        click.echo(f"{len(ws)} words, highlight/frequency r = {r:.3f}")
    _plot_proportion_by_frequency(ws, out / "proportion_by_frequency.png")
    emit_manifest(out / "words.manifest.json", "stats words", cfg,
                  inputs={"corpus": stories_file, "sessions": sessions_file},
                  outputs={"word_stats": out / "word_stats.csv"})


def _plot_rating_density(annotations, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .annotations.types import GUILT_QUESTIONS

    fig, ax = plt.subplots(figsize=(6, 3.5))
    for q in GUILT_QUESTIONS:
        vals = [a.slider for a in annotations if a.question == q and not a.doesnt_apply]
        if vals:
            ax.hist(vals, bins=25, range=(0, 1), density=True, histtype="step",
                    label=q.value)
    ax.set_xlabel("slider rating")
    ax.set_ylabel("density")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_proportion_by_frequency(word_stats_list, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not word_stats_list:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [ws.frequency for ws in word_stats_list]
    ys = [ws.proportion for ws in word_stats_list]
    ax.scatter(xs, ys, s=8, alpha=0.5, color="grey")
    total_hl = sum(ws.highlight_count for ws in word_stats_list)
    total_opp = sum(ws.opportunities for ws in word_stats_list)
    if total_opp:
        ax.axhline(total_hl / total_opp, linestyle="--", color="grey")
    ax.set_xscale("log")
    ax.set_xlabel("word frequency")
    ax.set_ylabel("highlight proportion")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# --------------------------------------------------------------------------
# model
# --------------------------------------------------------------------------

@main.group()
def model():
    """Pretrain, fine-tune, and run the rating/rationale model."""


_ENCODER_OPTIONS = [
    click.option("--hidden-size", type=int, default=64, show_default=True),
    click.option("--layers", type=int, default=2, show_default=True),
    click.option("--heads", type=int, default=4, show_default=True),
    click.option("--ff-size", type=int, default=128, show_default=True),
]


def encoder_options(fn):
    for opt in reversed(_ENCODER_OPTIONS):
        fn = opt(fn)
    return fn


def _encoder_cfg(cfg) -> dict:
    return {
        "hidden_size": cfg["hidden_size"],
        "num_layers": cfg["layers"],
        "num_heads": cfg["heads"],
        "ff_size": cfg["ff_size"],
    }


@model.command("pretrain")
@click.option("--corpus-dir", required=True, type=click.Path(),
              help="Directory with train/dev/test.jsonl from `corpus split`.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--steps", type=int, default=200, show_default=True)
@click.option("--batch-size", type=int, default=8, show_default=True)
@click.option("--lr", type=float, default=5e-5, show_default=True)
@click.option("--mask-prob", type=float, default=0.15, show_default=True)
@click.option("--max-length", type=int, default=400, show_default=True)
@click.option("--checkpoint-every", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=None)
@encoder_options
@click.pass_context
def model_pretrain(ctx, corpus_dir, out_dir, steps, batch_size, lr, mask_prob,
                   max_length, checkpoint_every, seed, hidden_size, layers, heads, ff_size):
    """Masked-language-model pretraining on the unlabeled corpus splits."""
    import torch

    from .modeling import MlmConfig, SubwordTokenizer, mlm_pretrain

    seed = ctx.obj["seed"] if seed is None else seed
    cfg = resolve(ctx, "model.pretrain", steps=steps, batch_size=batch_size, lr=lr,
                  mask_prob=mask_prob, max_length=max_length,
                  checkpoint_every=checkpoint_every, seed=seed,
                  hidden_size=hidden_size, layers=layers, heads=heads, ff_size=ff_size)
    splits = {}
    for name in ("train", "dev", "test"):
        splits[name] = _require_file(Path(corpus_dir) / f"{name}.jsonl", f"{name} split")
    _dry_run_exit(ctx, "model pretrain", cfg)
    parts = {name: _load_stories(path) for name, path in splits.items()}
    tokenizer = SubwordTokenizer.train(
        [[t.surface for t in s.tokens] for s in parts["train"]]
    )
    mlm_cfg = MlmConfig(
        mask_probability=cfg["mask_prob"], learning_rate=cfg["lr"],
        batch_size=cfg["batch_size"], total_steps=cfg["steps"],
        max_length=cfg["max_length"], seed=cfg["seed"],
        checkpoint_every=cfg["checkpoint_every"], encoder=_encoder_cfg(cfg),
    )
    try:
        result = mlm_pretrain(parts["train"], parts["dev"], parts["test"], tokenizer, mlm_cfg)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.save(result.encoder.state_dict(), out / "encoder.pt")
    tokenizer.save(out / "tokenizer.json")
    write_json(out / "config.json",
               {"mlm": mlm_cfg.to_dict(), "encoder": result.encoder.cfg.to_dict(),
                "test_loss": result.test_loss})
    with open(out / "history.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "train_loss", "dev_loss"])
        for point in result.history:
            writer.writerow([point.step, f"{point.train_loss:.6f}", f"{point.dev_loss:.6f}"])
    emit_manifest(out / "pretrain.manifest.json", "model pretrain", cfg,
                  inputs=splits, seeds={"mlm": cfg["seed"]},
                  outputs={"encoder": out / "encoder.pt"})
    first = result.history[0].dev_loss if result.history else float("nan")
    last = result.history[-1].dev_loss if result.history else float("nan")
    click.echo(f"dev loss {first:.3f} -> {last:.3f}; test loss {result.test_loss:.3f}")


@model.command("train")
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--aggregated", "agg_path", required=True, type=click.Path())
@click.option("--question", type=click.Choice(["reader_perception", "author_belief"]),
              default="reader_perception", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--pooling", type=click.Choice(["cls", "mean"]), default="mean",
              show_default=True)
@click.option("--lam", type=float, default=1.0, show_default=True,
              help="Token-loss ratio; 0 disables token supervision.")
@click.option("--lr", type=float, default=5e-5, show_default=True)
@click.option("--epochs", type=int, default=5, show_default=True)
@click.option("--warmup-ratio", type=float, default=0.1, show_default=True)
@click.option("--batch-size", type=int, default=16, show_default=True)
@click.option("--checkpoint-every", type=int, default=100, show_default=True)
@click.option("--max-length", type=int, default=400, show_default=True)
@click.option("--val-fraction", type=float, default=0.0, show_default=True,
              help="Optional held-out fraction for the checkpoint curve.")
@click.option("--pretrained", type=click.Path(), default=None,
              help="Directory from `model pretrain` to initialize the trunk.")
@click.option("--seed", type=int, default=None)
@encoder_options
@click.pass_context
def model_train(ctx, stories_path, agg_path, question, out_dir, pooling, lam, lr,
                epochs, warmup_ratio, batch_size, checkpoint_every, max_length,
                val_fraction, pretrained, seed, hidden_size, layers, heads, ff_size):
    """Fine-tune on aggregated targets and save a checkpoint directory."""
    import torch

    from .corpus.splits import split_corpus as _split
    from .modeling import (
        EncoderConfig,
        SubwordTokenizer,
        TinyEncoder,
        TrainConfig,
        build_dataset,
        save_checkpoint,
        train as train_model,
    )

    seed = ctx.obj["seed"] if seed is None else seed
    cfg = resolve(ctx, "model.train", question=question, pooling=pooling, lam=lam,
                  lr=lr, epochs=epochs, warmup_ratio=warmup_ratio,
                  batch_size=batch_size, checkpoint_every=checkpoint_every,
                  max_length=max_length, val_fraction=val_fraction, seed=seed,
                  hidden_size=hidden_size, layers=layers, heads=heads, ff_size=ff_size)
    stories_file = _require_file(stories_path, "corpus")
    agg_file = _require_file(agg_path, "aggregated targets")
    pre_dir = Path(pretrained) if pretrained else None
    if pre_dir is not None:
        _require_file(pre_dir / "encoder.pt", "pretrained encoder")
    _dry_run_exit(ctx, "model train", cfg)
    stories = _load_stories(stories_file)
    aggregated = _load_aggregated(agg_file)

    if pre_dir is not None:
        tokenizer = SubwordTokenizer.load(pre_dir / "tokenizer.json")
        pre_cfg = read_json(pre_dir / "config.json")["encoder"]
        encoder = TinyEncoder(EncoderConfig(**pre_cfg))
        encoder.load_state_dict(torch.load(pre_dir / "encoder.pt", weights_only=True))
        enc_overrides = {k: v for k, v in pre_cfg.items()
                         if k in ("hidden_size", "num_layers", "num_heads", "ff_size")}
    else:
        tokenizer = SubwordTokenizer.train([[t.surface for t in s.tokens] for s in stories])
        encoder = None
        enc_overrides = _encoder_cfg(cfg)

    dataset = build_dataset(tokenizer, stories, aggregated, cfg["question"],
                            cfg["max_length"])
    if not dataset:
        raise SchemaError(f"no training examples for question {cfg['question']}")
    val_dataset = None
    if cfg["val_fraction"] > 0:
        train_part, val_part = _split(
            dataset, (1 - cfg["val_fraction"], cfg["val_fraction"]),
            seed=cfg["seed"], key=lambda ex: ex.story_id,
        )
        dataset, val_dataset = list(train_part), list(val_part)

    train_cfg = TrainConfig(
        question=cfg["question"], pooling=cfg["pooling"], lam=cfg["lam"],
        learning_rate=cfg["lr"], epochs=cfg["epochs"],
        warmup_ratio=cfg["warmup_ratio"], batch_size=cfg["batch_size"],
        seed=cfg["seed"], checkpoint_every=cfg["checkpoint_every"],
        max_length=cfg["max_length"], encoder=enc_overrides,
    )
    result = train_model(dataset, train_cfg, tokenizer, val_dataset=val_dataset,
                         encoder=encoder)
    out = Path(out_dir)
    save_checkpoint(out, result.model, tokenizer, train_cfg,
                    extra={"steps": result.steps,
                           "final_train_loss": result.final_train_loss,
                           "pretrained": str(pre_dir) if pre_dir else None})
    with open(out / "history.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "train_loss", "val_mse"])
        for c in result.checkpoints:
            writer.writerow([c.step, f"{c.train_loss:.6f}",
                             "" if c.val_mse is None else f"{c.val_mse:.6f}"])
    emit_manifest(out / "train.manifest.json", "model train", cfg,
                  inputs={"corpus": stories_file, "aggregated": agg_file},
                  seeds={"train": cfg["seed"]}, outputs={"checkpoint": out})
    click.echo(f"trained {result.steps} steps, final loss {result.final_train_loss:.4f}")


@model.command("predict")
@click.option("--model", "model_dir", required=True, type=click.Path())
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def model_predict(ctx, model_dir, in_path, out_path):
    """Write one {story_id, rating, token_scores} record per story."""
    from .modeling import load_checkpoint, predict as predict_fn

    cfg = resolve(ctx, "model.predict")
    ckpt = Path(model_dir)
    _require_file(ckpt / "model.pt", "model checkpoint")
    src = _require_file(in_path, "stories")
    _dry_run_exit(ctx, "model predict", cfg)
    guilt_model, tokenizer, meta = load_checkpoint(ckpt)
    max_length = meta["config"].get("max_length", 400)
    stories = _load_stories(src)
    records = []
    for story in stories:
        rating, scores = predict_fn(guilt_model, tokenizer, story, max_length)
        records.append({"story_id": story.id, "rating": rating, "token_scores": scores})
    write_jsonl(out_path, records)
    emit_manifest(Path(out_path).with_suffix(".manifest.json"), "model predict", cfg,
                  inputs={"stories": src}, outputs={"predictions": out_path})
    click.echo(f"predicted {len(records)} stories")


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------

@main.group(name="eval")
def eval_group():
    """Repeated-split evaluation protocol."""


@eval_group.command("run")
@click.option("--plan", "plan_path", required=True, type=click.Path())
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--aggregated", "agg_path", required=True, type=click.Path())
@click.option("--out-dir", "out_dir", type=click.Path(), default=None)
@click.pass_context
def eval_run(ctx, plan_path, stories_path, agg_path, out_dir):
    """Execute the plan; resumes from existing per-run artifacts."""
    from .evaluation import (
        ExperimentPlan,
        ModelRunner,
        items_from_aggregated,
        run_experiment,
        write_ci_csv,
        write_results_table_csv,
        write_significance_csv,
    )

    out_dir = out_dir or ctx.obj.get("out_dir")
    if not out_dir:
        raise click.UsageError("--out-dir required")
    plan_file = _require_file(plan_path, "plan")
    stories_file = _require_file(stories_path, "corpus")
    agg_file = _require_file(agg_path, "aggregated targets")
    try:
        plan = ExperimentPlan.from_dict(read_json(plan_file))
    except (TypeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"bad plan: {exc}") from exc
    cfg = resolve(ctx, "eval.run")
    cfg["plan"] = plan.to_dict()
    _dry_run_exit(ctx, "eval run", cfg)
    stories = _load_stories(stories_file)
    aggregated = _load_aggregated(agg_file)
    runner = ModelRunner(stories, aggregated)
    report = run_experiment(plan, items_from_aggregated(aggregated), runner, out_dir)
    out = Path(out_dir)
    write_json(out / "report.json", report.to_dict())
    write_results_table_csv(report, plan, out / "results_table.csv")
    write_ci_csv(report, out / "results_ci.csv")
    write_significance_csv(report, out / "significance.csv")
    emit_manifest(out / "eval.manifest.json", "eval run", cfg,
                  inputs={"plan": plan_file, "corpus": stories_file,
                          "aggregated": agg_file},
                  seeds={"base": plan.base_seed},
                  outputs={"report": out / "report.json"})
    click.echo(f"report written: {out / 'report.json'}")


@eval_group.command("report")
@click.option("--plan", "plan_path", required=True, type=click.Path())
@click.option("--runs-dir", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def eval_report(ctx, plan_path, runs_dir, out_path):
    """Rebuild the results table from persisted run artifacts."""
    from .evaluation import ExperimentPlan, build_report, write_results_table_csv

    plan_file = _require_file(plan_path, "plan")
    runs = Path(runs_dir)
    if not (runs / "runs").is_dir() and not runs.name == "runs":
        if not runs.is_dir():
            raise MissingInput(f"runs directory not found: {runs}")
    plan = ExperimentPlan.from_dict(read_json(plan_file))
    cfg = resolve(ctx, "eval.report")
    _dry_run_exit(ctx, "eval report", cfg)
    base = runs if (runs / "runs").is_dir() else runs.parent
    report = build_report(plan, base)
    write_results_table_csv(report, plan, out_path)
    emit_manifest(Path(out_path).with_suffix(".manifest.json"), "eval report", cfg,
                  inputs={"plan": plan_file}, outputs={"table": out_path})
    click.echo(f"table written: {out_path}")


# --------------------------------------------------------------------------
# attrib
# --------------------------------------------------------------------------

@main.group()
def attrib():
    """Gradient-based token importance."""


@attrib.command("run")
@click.option("--model", "model_dir", required=True, type=click.Path())
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--steps", type=int, default=64, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def attrib_run(ctx, model_dir, stories_path, steps, out_path):
    """One attribution record per story (signed word scores)."""
    from .attribution import integrated_gradients
    from .modeling import load_checkpoint

    cfg = resolve(ctx, "attrib.run", steps=steps)
    ckpt = Path(model_dir)
    _require_file(ckpt / "model.pt", "model checkpoint")
    src = _require_file(stories_path, "stories")
    _dry_run_exit(ctx, "attrib run", cfg)
    guilt_model, tokenizer, meta = load_checkpoint(ckpt)
    max_length = meta["config"].get("max_length", 400)
    records = []
    for story in _load_stories(src):
        res = integrated_gradients(guilt_model, tokenizer, story, steps=cfg["steps"],
                                   max_length=max_length)
        records.append(res.to_dict())
    write_jsonl(out_path, records)
    emit_manifest(Path(out_path).with_suffix(".manifest.json"), "attrib run", cfg,
                  inputs={"stories": src}, outputs={"attributions": out_path})
    click.echo(f"attributed {len(records)} stories")


@attrib.command("compare")
@click.option("--attrib", "attrib_path", required=True, type=click.Path())
@click.option("--stats", "stats_path", required=True, type=click.Path(),
              help="word_stats.csv from `stats words`.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--chance-rate", type=float, default=None,
              help="Defaults to the pooled rate over the word-stats table.")
@click.pass_context
def attrib_compare(ctx, attrib_path, stats_path, out_path, chance_rate):
    """Correlate model importance with human highlight proportions."""
    from .attribution import aggregate_importance, compare_to_highlights
    from .attribution.integrated_gradients import AttributionResult
    from .stats.words import WordStats

    cfg = resolve(ctx, "attrib.compare", chance_rate=chance_rate)
    attrib_file = _require_file(attrib_path, "attributions")
    stats_file = _require_file(stats_path, "word stats")
    _dry_run_exit(ctx, "attrib compare", cfg)
    results = []
    for rec in read_jsonl(attrib_file):
        results.append(
            AttributionResult(
                story_id=rec["story_id"], word_scores=rec["word_scores"],
                words=rec["words"], rating=rec["rating"],
                baseline_rating=rec["baseline_rating"],
                completeness_delta=rec["completeness_delta"], steps=rec["steps"],
            )
        )
    stats_rows = []
    with open(stats_file, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            stats_rows.append(
                WordStats(word=row["word"], frequency=int(row["frequency"]),
                          opportunities=int(row["opportunities"]),
                          highlight_count=int(row["highlight_count"]))
            )
    if not stats_rows:
        raise SchemaError("empty word-stats table")
    rate = cfg["chance_rate"]
    if rate is None:
        total_opp = sum(ws.opportunities for ws in stats_rows)
        rate = sum(ws.highlight_count for ws in stats_rows) / total_opp if total_opp else 0.0
    importance = aggregate_importance(results)
    try:
        comparison = compare_to_highlights(importance, stats_rows, chance_rate=rate)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    payload = comparison.to_dict()
    payload["chance_rate"] = rate
    write_json(out_path, payload)
    emit_manifest(Path(out_path).with_suffix(".manifest.json"), "attrib compare", cfg,
                  inputs={"attributions": attrib_file, "word_stats": stats_file},
                  outputs={"comparison": out_path})
    click.echo(f"|importance| vs highlight proportion r = {comparison.pearson_r:.3f}, "
               f"above-chance Welch p = {comparison.welch.p:.3g}")


# --------------------------------------------------------------------------
# serve + fixture
# --------------------------------------------------------------------------

@main.command("serve")
@click.option("--stories", "stories_path", required=True, type=click.Path())
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--static-dir", type=click.Path(), default=None,
              help="Built UI assets to serve at /.")
@click.option("--seed", type=int, default=None)
@click.pass_context
def serve(ctx, stories_path, data_dir, host, port, static_dir, seed):
    """Run the annotation collection service."""
    import uvicorn

    from .service import create_app

    seed = ctx.obj["seed"] if seed is None else seed
    stories_file = _require_file(stories_path, "corpus")
    cfg = resolve(ctx, "serve", host=host, port=port, seed=seed)
    _dry_run_exit(ctx, "serve", cfg)
    stories = _load_stories(stories_file)
    app = create_app(stories, data_dir, seed=cfg["seed"], static_dir=static_dir)
    uvicorn.run(app, host=cfg["host"], port=cfg["port"])


@main.command("fixture")
@click.option("--out-dir", "out_dir", type=click.Path(), default=None)
@click.option("--stories", "n_stories", type=int, default=30, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.pass_context
def fixture(ctx, out_dir, n_stories, seed):
    """Regenerate the bundled synthetic corpus (archive, sessions, truth)."""
    from .fixtures import write_fixture

    out_dir = out_dir or ctx.obj.get("out_dir")
    if not out_dir:
        raise click.UsageError("--out-dir required")
    cfg = resolve(ctx, "fixture", n_stories=n_stories, seed=seed)
    _dry_run_exit(ctx, "fixture", cfg)
    paths = write_fixture(out_dir, n_stories=cfg["n_stories"], seed=cfg["seed"])
    emit_manifest(Path(out_dir) / "fixture.manifest.json", "fixture", cfg,
                  inputs={}, seeds={"fixture": cfg["seed"]},
                  outputs=paths)
    click.echo(f"fixture written under {out_dir}")


if __name__ == "__main__":
    main()
