from __future__ import annotations

import pytest

from ovc.aas import Repository
from ovc.aml import caex_to_instancemodel, caex_to_typemodel, parse_caex
from ovc.demo import INSTANCE_FIXTURES, TYPE_FIXTURE, fixture_bytes, seed_demo
from ovc.model import InstanceModel, TypeModel


@pytest.fixture(scope="session")
def demo_tm() -> TypeModel:
    return caex_to_typemodel(parse_caex(fixture_bytes(TYPE_FIXTURE), TYPE_FIXTURE))


def _instance(tm: TypeModel, variant: str) -> InstanceModel:
    name = INSTANCE_FIXTURES[variant]
    return caex_to_instancemodel(parse_caex(fixture_bytes(name), name), tm)


@pytest.fixture(scope="session")
def demo_im(demo_tm: TypeModel) -> InstanceModel:
    return _instance(demo_tm, "successful")


@pytest.fixture(scope="session")
def violated_im(demo_tm: TypeModel) -> InstanceModel:
    return _instance(demo_tm, "violated")


@pytest.fixture(scope="session")
def demo_ocl() -> str:
    return fixture_bytes("demo.ocl").decode("utf-8")


@pytest.fixture
def store(tmp_path):
    return tmp_path / "store"


@pytest.fixture
def seeded(store):
    repo = Repository.open(store)
    seed_demo(repo, "successful")
    return repo


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import VERDICTS

    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[number])
