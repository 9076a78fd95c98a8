"""Workbench for authoring business automations in natural language.

NL statements are translated into a constrained natural language (CNL) by
trie-masked beam search over a pluggable scorer, reviewed and validated at
the CNL level, then transpiled into a JSON rule program executed by the
bundled engine.
"""

__version__ = "0.1.0"

from .cnl import (
    CnlAst,
    CnlGrammar,
    ParseError,
    default_grammar,
    normalize,
    parse,
    parse_text,
    semantic_equal,
    serialize,
    tokenize,
)
from .corpus import GeneratorConfig, PairCorpus, SplitSpec, generate_synthetic
from .decoding import BeamConfig, DecodeResult, beam_decode
from .rules import RuleProgram, execute, transpile
from .scorers import retrieval_mixture_scorer, train_ngram
from .trie import MarkerPolicy, TokenTrie, build_trie

__all__ = [
    "BeamConfig",
    "CnlAst",
    "CnlGrammar",
    "DecodeResult",
    "GeneratorConfig",
    "MarkerPolicy",
    "PairCorpus",
    "ParseError",
    "RuleProgram",
    "SplitSpec",
    "TokenTrie",
    "beam_decode",
    "build_trie",
    "default_grammar",
    "execute",
    "generate_synthetic",
    "normalize",
    "parse",
    "parse_text",
    "retrieval_mixture_scorer",
    "semantic_equal",
    "serialize",
    "tokenize",
    "train_ngram",
    "transpile",
]
