from __future__ import annotations

import pytest

from cnl_workbench import cnl, corpus as corpus_mod
from cnl_workbench.corpus import GeneratorConfig, SplitSpec

# Seed-pinned corpus shared by the trend criteria and harness tests.
SYNTH_SEED = 20260809
SPLIT_SEED = 7
LIMIT_SEED = 11

_acceptance_lines: list[str] = []


def record_acceptance(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    _acceptance_lines.append(f"[acceptance] {status}  {name}{suffix}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grammar():
    return cnl.default_grammar()


@pytest.fixture(scope="session")
def synth_corpus():
    generated = corpus_mod.generate_synthetic(GeneratorConfig(seed=SYNTH_SEED, rule_count=500))
    return corpus_mod.split(generated, SplitSpec(seed=SPLIT_SEED))


@pytest.fixture(scope="session")
def small_corpus():
    generated = corpus_mod.generate_synthetic(GeneratorConfig(seed=3, rule_count=120))
    return corpus_mod.split(generated, SplitSpec(seed=1))
