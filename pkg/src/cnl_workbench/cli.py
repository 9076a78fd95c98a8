"""Command-line entry points: serve, generate, split, translate, eval, transpile, run."""

from __future__ import annotations

import json
import sys

import click

from . import cnl, corpus as corpus_mod, harness, rules
from .corpus import GeneratorConfig, SplitSpec, generator_config_from_json_dict
from .decoding import BeamConfig
from .service import build_state, create_app, load_config


@click.group()
def main():
    """Workbench for authoring business rules in natural language."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(config_path: str, port: int, host: str):
    """Run the HTTP service."""
    import uvicorn

    state = build_state(load_config(config_path))
    uvicorn.run(create_app(state), host=host, port=port)


@main.command()
@click.option("--seed", default=0, show_default=True)
@click.option("--count", default=500, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Generator config JSON; overrides --seed/--count.")
@click.option("--out", required=True, type=click.Path())
def generate(seed: int, count: int, config_path: str | None, out: str):
    """Synthesize an NL-CNL pair corpus."""
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            config = generator_config_from_json_dict(json.load(fh))
    else:
        config = GeneratorConfig(seed=seed, rule_count=count)
    corpus = corpus_mod.generate_synthetic(config)
    corpus_mod.save_jsonl(corpus, out)
    click.echo(f"wrote {len(corpus)} pairs to {out}")


@main.command("split")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
@click.option("--train", default=0.70, show_default=True)
@click.option("--test", default=0.24, show_default=True)
@click.option("--validation", default=0.06, show_default=True)
def split_cmd(in_path: str, out: str, seed: int, train: float, test: float, validation: float):
    """Assign train/test/validation labels to a JSONL corpus."""
    corpus = corpus_mod.load_jsonl(in_path)
    corpus = corpus_mod.split(corpus, SplitSpec(train, test, validation, seed))
    corpus_mod.save_jsonl(corpus, out)
    sizes = corpus.split_sizes()
    click.echo(f"split {len(corpus)} pairs: {sizes}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--nl", required=True)
@click.option("--beam-width", default=None, type=int)
@click.option("--constrained/--unconstrained", default=True)
@click.option("--candidates", default=5, show_default=True)
def translate(config_path: str, nl: str, beam_width: int | None, constrained: bool, candidates: int):
    """Translate one NL statement to CNL candidates."""
    from .decoding import beam_decode

    state = build_state(load_config(config_path))
    if state.corpus is None or not state.scorers:
        raise click.ClickException("config must load a corpus and scorer")
    scorer = state.scorers[state.default_scorer]
    config = BeamConfig(
        beam_width=beam_width or state.beam.beam_width,
        max_length=state.beam.max_length,
        constrained=constrained,
        trie_scope=state.trie_scope,
        literal_expansion=state.beam.literal_expansion,
    )
    grammar = state.grammar if state.corpus.grammar_bound else None
    result = beam_decode(nl, scorer, state.trie if constrained else None, config, grammar)
    for candidate in result.candidates[:candidates]:
        mark = "ok " if candidate.valid else "BAD"
        click.echo(f"[{mark}] {candidate.score:9.4f}  {candidate.text}")
    if result.constraint_exhausted:
        click.echo("constraint exhausted", err=True)


@main.command("eval")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--dataset-name", default="dataset", show_default=True)
@click.option("--out-prefix", type=click.Path(), help="Write <prefix>.txt/.csv/.json reports.")
def eval_cmd(config_path: str, dataset_name: str, out_prefix: str | None):
    """Evaluate configured scorers with and without constrained decoding."""
    state = build_state(load_config(config_path))
    if state.corpus is None or not state.scorers:
        raise click.ClickException("config must load a corpus and scorer")
    grammar = state.grammar if state.corpus.grammar_bound else None
    reports = []
    all_records = {}
    for scorer_id in sorted(state.scorers):
        scorer = state.scorers[scorer_id]
        for constrained in (False, True):
            config = BeamConfig(
                beam_width=state.beam.beam_width,
                max_length=state.beam.max_length,
                constrained=constrained,
                trie_scope=state.trie_scope,
                literal_expansion=state.beam.literal_expansion,
            )
            translator = harness.DecoderTranslator(
                scorer, state.trie if constrained else None, config, grammar
            )
            report, records = harness.run_eval(
                state.corpus, translator, grammar,
                configuration=scorer_id, dataset=dataset_name,
                constrained=constrained, trie_scope=state.trie_scope if constrained else None,
            )
            reports.append(report)
            label = scorer_id + ("/C." if constrained else "")
            all_records[label] = records
    text, csv_text = harness.render_table(reports)
    click.echo(text, nl=False)
    if out_prefix:
        with open(out_prefix + ".txt", "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(out_prefix + ".csv", "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        with open(out_prefix + ".json", "w", encoding="utf-8") as fh:
            fh.write(json.dumps(
                {label: json.loads(harness.records_to_json(records))
                 for label, records in all_records.items()},
                indent=2,
            ))
        click.echo(f"reports written to {out_prefix}.txt/.csv/.json")


@main.command()
@click.option("--cnl", "cnl_text", required=True)
@click.option("--grammar", "grammar_path", type=click.Path(exists=True))
@click.option("--name", default="rule", show_default=True)
def transpile(cnl_text: str, grammar_path: str | None, name: str):
    """Transpile a CNL rule to its JSON rule program."""
    grammar = cnl.load_grammar(grammar_path) if grammar_path else cnl.default_grammar()
    try:
        ast = cnl.parse_text(cnl_text, grammar)
    except cnl.ParseError as exc:
        raise click.ClickException(str(exc))
    program = rules.transpile(ast, grammar, name=name)
    click.echo(rules.program_to_json(program), nl=False)


@main.command()
@click.option("--program", "program_path", required=True, type=click.Path(exists=True))
@click.option("--records", "records_path", required=True, type=click.Path(exists=True),
              help="JSONL, one attribute-value record per line.")
def run(program_path: str, records_path: str):
    """Execute a rule program against records; one trace JSON per line."""
    with open(program_path, "r", encoding="utf-8") as fh:
        program = rules.program_from_json_dict(json.load(fh))
    with open(records_path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    from decimal import Decimal

    for line in lines:
        record = {
            k: Decimal(str(v)) if isinstance(v, float) else v
            for k, v in json.loads(line).items()
        }
        try:
            trace = rules.execute(program, record)
        except rules.TypeMismatch as exc:
            click.echo(json.dumps({"fired": False, "error": str(exc)}))
            continue
        click.echo(json.dumps(rules.trace_to_json_dict(trace)))


if __name__ == "__main__":
    sys.exit(main())
