"""HTTP facade over translation, validation, transpilation and execution.

The server is read-only: grammar, corpus, trie and scorers are fixed at
startup from a JSON config, so requests need no mutual exclusion and any
request ordering yields identical responses. Authoring state lives in the
browser, not here.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import cnl, corpus as corpus_mod, rules
from .cnl import CnlGrammar
from .corpus import PairCorpus, SplitSpec
from .decoding import BeamConfig, beam_decode
from .lm_client import EndpointUnavailable, LmClient, LmEndpointConfig, RemoteLmScorer
from .scorers import retrieval_mixture_scorer, train_ngram
from .trie import MarkerPolicy, TokenTrie, build_trie


@dataclass
class AppState:
    grammar: CnlGrammar
    corpus: Optional[PairCorpus] = None
    trie: Optional[TokenTrie] = None
    scorers: dict = field(default_factory=dict)
    default_scorer: str = "mixture"
    beam: BeamConfig = field(default_factory=BeamConfig)
    trie_scope: str = "train"
    static_dir: Optional[str] = None


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def build_state(config: dict) -> AppState:
    """Materialize grammar, corpus, trie and scorers from a config document."""
    grammar = (
        cnl.load_grammar(config["grammar"]) if config.get("grammar") else cnl.default_grammar()
    )
    state = AppState(grammar=grammar)
    state.trie_scope = config.get("trie_scope", "train")

    corpus_cfg = config.get("corpus")
    if corpus_cfg:
        if corpus_cfg.get("format", "jsonl") == "tsv":
            loaded = corpus_mod.load_tsv_adapter(corpus_cfg["path"])
        else:
            bound = corpus_cfg.get("grammar_bound", True)
            loaded = corpus_mod.load_jsonl(corpus_cfg["path"], grammar if bound else None)
        split_cfg = config.get("split")
        if split_cfg:
            loaded = corpus_mod.split(
                loaded,
                SplitSpec(
                    train=split_cfg.get("train", 0.70),
                    test=split_cfg.get("test", 0.24),
                    validation=split_cfg.get("validation", 0.06),
                    seed=split_cfg.get("seed", 0),
                ),
            )
        limit_cfg = config.get("limit_train")
        if limit_cfg:
            loaded = corpus_mod.sample_limited(
                loaded, n=limit_cfg.get("n", 100), seed=limit_cfg.get("seed", 0)
            )
        state.corpus = loaded

    beam_cfg = config.get("beam", {})
    state.beam = BeamConfig(
        beam_width=beam_cfg.get("beam_width", 4),
        max_length=beam_cfg.get("max_length", 64),
        constrained=beam_cfg.get("constrained", True),
        trie_scope=state.trie_scope,
        literal_expansion=beam_cfg.get("literal_expansion", False),
        renormalize=beam_cfg.get("renormalize", True),
    )
    policy = (
        MarkerPolicy.ABSTRACT_LITERALS
        if beam_cfg.get("marker_policy") == "abstract-literals"
        else MarkerPolicy.NONE
    )
    if state.corpus is not None:
        statements = state.corpus.statements(state.trie_scope)
        if statements:
            state.trie = build_trie(statements, policy)
        train_cnls = [p.cnl for p in state.corpus.pairs_of("train")]
        scorer_cfg = config.get("scorer", {})
        order = scorer_cfg.get("order", 3)
        add_k = scorer_cfg.get("k", 0.1)
        if train_cnls:
            ngram = train_ngram(train_cnls, order=order, k=add_k)
            state.scorers["ngram"] = ngram
            state.scorers["mixture"] = retrieval_mixture_scorer(
                state.corpus,
                k=scorer_cfg.get("top_k", 5),
                lam=scorer_cfg.get("lambda", 0.5),
                ngram=ngram,
            )
        endpoint_cfg = scorer_cfg.get("endpoint")
        if endpoint_cfg:
            client = LmClient(
                LmEndpointConfig(
                    base_url=endpoint_cfg["base_url"],
                    token_env=endpoint_cfg.get("token_env", "CNL_LM_TOKEN"),
                    timeout=endpoint_cfg.get("timeout", 10.0),
                    max_retries=endpoint_cfg.get("max_retries", 2),
                    context_window=endpoint_cfg.get("context_window", 2048),
                )
            )
            state.scorers["remote"] = RemoteLmScorer(client, state.corpus)
        state.default_scorer = config.get("scorer", {}).get("id", "mixture")
        if state.default_scorer not in state.scorers and state.scorers:
            state.default_scorer = sorted(state.scorers)[0]
    state.static_dir = config.get("static_dir")
    return state


class TranslateRequest(BaseModel):
    nl: str
    beam_width: int = Field(default=4, ge=1)
    constrained: bool = True
    max_candidates: int = Field(default=5, ge=1)
    scorer: Optional[str] = None


class CnlPayload(BaseModel):
    cnl: str


class ExecutePayload(BaseModel):
    program: dict
    record: dict


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="cnl-workbench")

    @app.post("/api/translate")
    def translate(request: TranslateRequest):
        if not request.nl.strip():
            raise HTTPException(status_code=400, detail="nl must be non-empty")
        if state.corpus is None or not state.scorers:
            raise HTTPException(status_code=409, detail="no corpus/scorer loaded")
        scorer_id = request.scorer or state.default_scorer
        scorer = state.scorers.get(scorer_id)
        if scorer is None:
            raise HTTPException(status_code=400, detail=f"unknown scorer {scorer_id!r}")
        if request.constrained and state.trie is None:
            raise HTTPException(status_code=409, detail="no trie available for constrained decoding")
        config = BeamConfig(
            beam_width=request.beam_width,
            max_length=state.beam.max_length,
            constrained=request.constrained,
            trie_scope=state.trie_scope,
            literal_expansion=state.beam.literal_expansion,
            renormalize=state.beam.renormalize,
        )
        grammar = state.grammar if (state.corpus and state.corpus.grammar_bound) else None
        try:
            result = beam_decode(
                request.nl, scorer, state.trie if request.constrained else None, config, grammar
            )
        except EndpointUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        candidates = [
            {
                "cnl": c.text,
                "score": c.score,
                "valid": c.valid,
                "parse_error": c.parse_error,
            }
            for c in result.candidates[: request.max_candidates]
        ]
        return {
            "candidates": candidates,
            "constraint_exhausted": result.constraint_exhausted,
            "max_length_exceeded": result.max_length_exceeded,
        }

    @app.post("/api/validate")
    def validate(payload: CnlPayload):
        if not payload.cnl.strip():
            raise HTTPException(status_code=400, detail="cnl must be non-empty")
        try:
            tokens = cnl.tokenize(payload.cnl)
        except cnl.UnterminatedQuote as exc:
            return {"valid": False, "error": {"position": 0, "expected": [], "found": None,
                                              "message": str(exc)}}
        try:
            ast = cnl.parse(tokens, state.grammar)
        except cnl.ParseError as exc:
            return {
                "valid": False,
                "error": {
                    "position": exc.position,
                    "expected": sorted(exc.expected),
                    "found": exc.found,
                    "message": str(exc),
                },
            }
        return {
            "valid": True,
            "ast": {
                "condition": cnl.serialize_condition(ast.condition),
                "actions": [a.template for a in ast.actions],
                "normalized": cnl.serialize(cnl.normalize(ast), state.grammar),
            },
        }

    @app.post("/api/transpile")
    def transpile(payload: CnlPayload):
        try:
            ast = cnl.parse_text(payload.cnl, state.grammar)
        except (cnl.ParseError, cnl.UnterminatedQuote) as exc:
            detail = {"message": str(exc)}
            if isinstance(exc, cnl.ParseError):
                detail.update(position=exc.position, expected=sorted(exc.expected), found=exc.found)
            return JSONResponse(status_code=422, content={"detail": detail})
        program = rules.transpile(ast, state.grammar)
        return rules.program_to_json_dict(program)

    @app.post("/api/execute")
    def execute(payload: ExecutePayload):
        try:
            program = rules.program_from_json_dict(payload.program)
        except rules.ProgramSchemaError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        record = {k: _record_value(v) for k, v in payload.record.items()}
        try:
            trace = rules.execute(program, record)
        except rules.TypeMismatch as exc:
            return {"fired": False, "error": f"TypeMismatch: {exc}"}
        return rules.trace_to_json_dict(trace)

    @app.get("/api/corpus/stats")
    def corpus_stats():
        if state.corpus is None:
            raise HTTPException(status_code=409, detail="no corpus loaded")
        return {
            "n_pairs": len(state.corpus),
            "splits": state.corpus.split_sizes(),
            "grammar_bound": state.corpus.grammar_bound,
            "trie_scope": state.trie_scope,
            "provenance": state.corpus.provenance,
        }

    if state.static_dir and os.path.isdir(state.static_dir):
        app.mount("/", StaticFiles(directory=state.static_dir, html=True), name="ui")

    return app


def _record_value(value):
    # JSON numbers arrive as int/float; the engine compares in decimal.
    if isinstance(value, bool) or isinstance(value, (str, int)):
        return value
    if isinstance(value, float):
        from decimal import Decimal

        return Decimal(str(value))
    return value
