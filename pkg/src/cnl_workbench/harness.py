"""Evaluation harness: translate a test split, score it, render report tables.

A translator is anything with ``translate(nl) -> str``. Three are provided:
the beam decoder over a built-in scorer, a retrieval top-1 baseline, and the
remote-LM client. ``run_eval`` never aborts on translator errors; failed
examples score as empty predictions and are marked invalid.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence

from . import cnl, metrics
from .cnl import CnlGrammar
from .corpus import PairCorpus
from .decoding import BeamConfig, beam_decode
from .prompting import rank_by_similarity
from .scorers import Scorer
from .trie import TokenTrie


class Translator(Protocol):
    def translate(self, nl: str) -> str: ...


class DecoderTranslator:
    """NL -> CNL through beam search; returns the best finished candidate."""

    def __init__(self, scorer: Scorer, trie: Optional[TokenTrie], config: BeamConfig,
                 grammar: Optional[CnlGrammar] = None):
        self.scorer = scorer
        self.trie = trie
        self.config = config
        self.grammar = grammar

    def translate(self, nl: str) -> str:
        result = beam_decode(nl, self.scorer, self.trie, self.config, self.grammar)
        for candidate in result.candidates:
            if candidate.hypothesis.finished:
                return candidate.text
        return result.candidates[0].text if result.candidates else ""


class RetrievalTop1Translator:
    """Memorization baseline: the CNL of the most similar training NL."""

    def __init__(self, corpus: PairCorpus):
        self.corpus = corpus
        self._by_id = {p.id: p for p in corpus.pairs_of("train")}

    def translate(self, nl: str) -> str:
        ranked = rank_by_similarity(nl, self.corpus)
        return self._by_id[ranked[0]].cnl


@dataclass(frozen=True)
class PredictionRecord:
    pair_id: str
    predicted: str
    reference: str
    seconds: float
    valid: bool
    error: Optional[str] = None


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    semantic_accuracy: float
    bleu: float
    rouge_l: float
    mean_inference_seconds: float
    n: int
    n_valid: int
    configuration: str = ""
    dataset: str = ""
    constrained: Optional[bool] = None
    trie_scope: Optional[str] = None


def run_eval(
    corpus: PairCorpus,
    translator: Translator,
    grammar: Optional[CnlGrammar] = None,
    configuration: str = "",
    dataset: str = "",
    constrained: Optional[bool] = None,
    trie_scope: Optional[str] = None,
    clock: Callable[[], float] = time.perf_counter,
) -> tuple[MetricReport, list[PredictionRecord]]:
    """Translate every test pair, timing the translator call only.

    Examples are processed in stable id order; translator exceptions mark
    the example invalid with an empty prediction and never abort the run.
    """
    test_pairs = sorted(corpus.pairs_of("test"), key=lambda p: p.id)
    if not test_pairs:
        raise ValueError("corpus has an empty test split")

    records: list[PredictionRecord] = []
    for pair in test_pairs:
        started = clock()
        error = None
        try:
            predicted = translator.translate(pair.nl)
        except Exception as exc:  # recorded, not raised: the run must finish
            predicted = ""
            error = f"{type(exc).__name__}: {exc}"
        seconds = clock() - started
        valid = _prediction_valid(predicted, grammar) and error is None
        records.append(
            PredictionRecord(pair.id, predicted, pair.cnl, seconds, valid, error)
        )

    predictions = [r.predicted for r in records]
    references = [r.reference for r in records]
    accuracy = metrics.exact_match_accuracy(predictions, references)
    if grammar is not None and corpus.grammar_bound:
        semantic = metrics.semantic_accuracy(predictions, references, grammar)
    else:
        # Without a grammar, semantic equivalence degenerates to exact match.
        semantic = accuracy
    report = MetricReport(
        accuracy=accuracy,
        semantic_accuracy=semantic,
        bleu=metrics.bleu(predictions, references),
        rouge_l=metrics.rouge_l(predictions, references),
        mean_inference_seconds=sum(r.seconds for r in records) / len(records),
        n=len(records),
        n_valid=sum(1 for r in records if r.valid),
        configuration=configuration,
        dataset=dataset,
        constrained=constrained,
        trie_scope=trie_scope,
    )
    return report, records


def _prediction_valid(predicted: str, grammar: Optional[CnlGrammar]) -> bool:
    if grammar is None:
        return bool(predicted.strip())
    try:
        cnl.parse_text(predicted, grammar)
        return True
    except (cnl.ParseError, cnl.UnterminatedQuote):
        return False


def records_to_json(records: Sequence[PredictionRecord]) -> str:
    return json.dumps(
        [
            {
                "id": r.pair_id,
                "predicted": r.predicted,
                "reference": r.reference,
                "seconds": r.seconds,
                "valid": r.valid,
                "error": r.error,
            }
            for r in records
        ],
        indent=2,
    ) + "\n"


def _row_label(report: MetricReport) -> str:
    # Constrained rows carry the /C. suffix, mirroring the reference layout.
    return report.configuration + ("/C." if report.constrained else "")


def render_table(reports: Sequence[MetricReport]) -> tuple[str, str]:
    """Accuracy grid: one row per configuration, one column per dataset.

    Returns (aligned plain text, CSV) carrying identical two-decimal values.
    INF is the mean per-example inference seconds on the row's first dataset.
    """
    if not reports:
        raise ValueError("nothing to render")
    datasets: list[str] = []
    rows: list[str] = []
    cells: dict[tuple[str, str], MetricReport] = {}
    for report in reports:
        label = _row_label(report)
        if report.dataset not in datasets:
            datasets.append(report.dataset)
        if label not in rows:
            rows.append(label)
        cells[(label, report.dataset)] = report

    header = ["Config", "INF"] + datasets
    table_rows: list[list[str]] = [header]
    for label in rows:
        first = next((cells[(label, d)] for d in datasets if (label, d) in cells), None)
        inf = f"{first.mean_inference_seconds:.2f}" if first else ""
        line = [label, inf]
        for dataset in datasets:
            report = cells.get((label, dataset))
            line.append(f"{report.accuracy:.2f}" if report else "")
        table_rows.append(line)

    widths = [max(len(row[i]) for row in table_rows) for i in range(len(header))]
    text_lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in table_rows
    ]
    text = "\n".join(text_lines) + "\n"

    buf = io.StringIO()
    for row in table_rows:
        buf.write(",".join(row))
        buf.write("\n")
    return text, buf.getvalue()
