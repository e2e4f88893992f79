import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import _report  # noqa: E402
from prefattach.laws import Constant, DiscretePmf, Exponential, Gamma  # noqa: E402
from prefattach.model import (  # noqa: E402
    AuthorCountLaw, EqualSplit, ExchangeableIid, FullBonus, ModelConfig, ab_config,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def nu_const(k):
    return AuthorCountLaw(((k, 1.0),))


@pytest.fixture
def ab():
    return ab_config(n_steps=1000, seed=1)


@pytest.fixture
def full_nu2():
    return ModelConfig(Constant(1), nu_const(2), FullBonus(Constant(1)), "discrete", 1000, 2)


@pytest.fixture
def split_nu2():
    return ModelConfig(Constant(1), nu_const(2), EqualSplit(Constant(2)), "discrete", 1000, 3)


@pytest.fixture
def split_mixed():
    """nu uniform on {1, 2}, Z = 2 shared equally."""
    return ModelConfig(
        Constant(1), AuthorCountLaw(((1, 0.5), (2, 0.5))), EqualSplit(Constant(2)), "discrete", 1000, 4
    )


@pytest.fixture
def rich_discrete():
    """Several bonus values, zero bonuses, mixed author counts."""
    return ModelConfig(
        DiscretePmf(((1, 0.6), (3, 0.4))),
        AuthorCountLaw(((1, 0.2), (2, 0.5), (4, 0.3))),
        ExchangeableIid(DiscretePmf(((0, 0.2), (1, 0.5), (2, 0.2), (5, 0.1)))),
        "discrete", 1000, 5,
    )


@pytest.fixture
def exp_single():
    return ModelConfig(Exponential(1.0), nu_const(1), ExchangeableIid(Exponential(1.0)), "continuous", 1000, 6)


@pytest.fixture
def split_gamma():
    """nu = 2, Z ~ Gamma(2, 1) shared equally, X ~ Exp(1)."""
    return ModelConfig(Exponential(1.0), nu_const(2), EqualSplit(Gamma(2.0, 1.0)), "continuous", 1000, 7)


@pytest.fixture
def full_exp2():
    """nu = 2, each author gets Y ~ Exp(rate 2), X ~ Exp(1)."""
    return ModelConfig(Exponential(1.0), nu_const(2), FullBonus(Exponential(2.0)), "continuous", 1000, 8)


def pytest_terminal_summary(terminalreporter):
    if _report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _report.LINES:
            terminalreporter.write_line(line)
