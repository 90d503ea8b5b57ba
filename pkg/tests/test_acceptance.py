"""Acceptance criteria 1-9, one test each.

Every test records a single ``AC<n> PASS|FAIL`` line; the lines are printed
as they happen and again in the pytest terminal summary.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import re
import time
from contextlib import contextmanager

import pytest

from httpclient import call, call_json, element_url
from ovc.aas import FileElement, Repository, load_repository, serialize_repository
from ovc.aml import caex_to_instancemodel, caex_to_typemodel, parse_caex
from ovc.cli import main
from ovc.demo import (
    CONSTRAINT_SUBMODEL_ID,
    INFO_SUBMODEL_ID,
    RESULT_SUBMODEL_ID,
    TEMPERATURE_ID_SHORT,
    demo_config,
    fixture_bytes,
    seed_demo,
)
from ovc.model import all_instances_of
from ovc.ocl import UNDEFINED, evaluate_expr, parse_expr
from ovc.model import InstanceModel, TypeModel
from ovc.pipeline import latest_report
from ovc.service import serve
from strategies import random_repository

VERDICTS: dict[int, str] = {}
SEED = 20240611
CASES = 1000
MAX_SIZE = 8
DOMAIN = (-5, 5)
NAMES = ["UniqueProcessOrderConstraint", "ProcessSequenceConstraint", "AppropriateTemperature"]


@contextmanager
def criterion(number: int, title: str):
    try:
        yield
    except BaseException as exc:
        VERDICTS[number] = f"AC{number} FAIL  {title}: {type(exc).__name__}: {exc}".splitlines()[0]
        print(VERDICTS[number])
        raise
    VERDICTS[number] = f"AC{number} PASS  {title}"
    print(VERDICTS[number])


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def statuses(text_report: str) -> dict[str, str]:
    found = re.findall(r"^(\w+) \[(\w+)\]", text_report, re.MULTILINE)
    return dict(found)


def test_ac1_golden_success(capsys, store):
    with criterion(1, "golden success: exit 0, 3 constraints all Satisfied, < 1 s"):
        start = time.perf_counter()
        assert cli(capsys, "seed-demo", "--store", str(store), "--variant", "successful")[0] == 0
        code, out, _ = cli(capsys, "validate", "--store", str(store))
        elapsed = time.perf_counter() - start
        assert code == 0
        assert statuses(out) == dict.fromkeys(NAMES, "Satisfied")
        assert out.splitlines()[-1] == "3 satisfied, 0 violated, 0 undefined"
        assert elapsed < 1.0, f"took {elapsed:.3f} s"


def test_ac2_golden_violation(capsys, store):
    with criterion(2, "golden violation: exit 2, all three Violated, < 1 s"):
        start = time.perf_counter()
        assert cli(capsys, "seed-demo", "--store", str(store), "--variant", "violated")[0] == 0
        code, out, _ = cli(capsys, "validate", "--store", str(store))
        elapsed = time.perf_counter() - start
        assert code == 2
        assert statuses(out) == dict.fromkeys(NAMES, "Violated")
        report = latest_report(Repository.open(store), demo_config())
        assert len(report.result("UniqueProcessOrderConstraint").violating_object_ids) >= 2
        # the message must show a current temperature above the limit
        message = report.result("AppropriateTemperature").message
        current = float(re.search(r"currentTemperature = ([\d.]+)", message).group(1))
        limit = float(re.search(r"maxTemperature = ([\d.]+)", message).group(1))
        assert current > limit
        assert elapsed < 1.0, f"took {elapsed:.3f} s"


def test_ac3_dynamic_injection_flip(capsys, store):
    with criterion(3, "dynamic injection: only AppropriateTemperature flips"):
        cli(capsys, "seed-demo", "--store", str(store))
        _, before, _ = cli(capsys, "validate", "--store", str(store))
        tm = caex_to_typemodel(parse_caex(fixture_bytes("DemoProductionProcessesTypemodel.aml")))
        im = caex_to_instancemodel(parse_caex(fixture_bytes("DemoShopfloorInstanceModel.aml")), tm)
        limit = im.get("DemoShopFloor").slots["maxTemperature"]
        value = math.nextafter(limit, math.inf)
        assert value > limit  # direct comparison oracle
        code, _, _ = cli(capsys, "set-prop", "--store", str(store), INFO_SUBMODEL_ID, TEMPERATURE_ID_SHORT, repr(value))
        assert code == 0
        code, after, _ = cli(capsys, "validate", "--store", str(store))
        assert code == 2
        expected = {**statuses(before), "AppropriateTemperature": "Violated"}
        assert statuses(before) == dict.fromkeys(NAMES, "Satisfied")
        assert statuses(after) == expected


# -- criterion 4 -------------------------------------------------------------

EMPTY = InstanceModel("m", TypeModel("T"))


def ev(text: str):
    return evaluate_expr(parse_expr(text), None, EMPTY)


def seq(values) -> str:
    return "Sequence{" + ", ".join(map(str, values)) + "}"


def random_collection(rng: random.Random) -> list[int]:
    return [rng.randint(*DOMAIN) for _ in range(rng.randint(0, MAX_SIZE))]


def boolean_expr(rng: random.Random, truth) -> str:
    """A randomly shaped expression whose value is ``truth``."""
    x, d = rng.randint(*DOMAIN), rng.randint(1, 5)
    if truth is UNDEFINED:
        return rng.choice([f"({x} / 0 > {d})", f"({x} / (3 - 3) = {x})", f"(not ({d} / 0 < {x}))"])
    if truth is True:
        return rng.choice([f"({x} < {x + d})", f"({x} = {x})", f"(Sequence{{{x}}}->includes({x}))"])
    return rng.choice([f"({x} > {x + d})", f"({x} <> {x})", f"(Sequence{{}}->includes({x}))"])


TRUTHS = (True, False, UNDEFINED)
# hand-written tables
AND = {(False, t): False for t in TRUTHS} | {(True, True): True, (True, False): False, (True, UNDEFINED): UNDEFINED}
OR = {(True, t): True for t in TRUTHS} | {(False, True): True, (False, False): False, (False, UNDEFINED): UNDEFINED}
IMPLIES = {(False, t): True for t in TRUTHS} | {(True, True): True, (True, False): False, (True, UNDEFINED): UNDEFINED}
for table in (AND, OR, IMPLIES):
    table.update({(UNDEFINED, t): UNDEFINED for t in TRUTHS})
NOT = {True: False, False: True, UNDEFINED: UNDEFINED}

PREDICATES = ["x > {k}", "x * x <= {k}", "x <> {k}", "x - {k} >= 0"]
PARTIAL_PREDICATES = PREDICATES + ["1 / x > {k}", "{k} / (x - {k}) < 1"]
KEYS = {
    "x": lambda x: x,
    "x * x": lambda x: x * x,
    "-x": lambda x: -x,
    "x / 2": lambda x: x / 2,
    "x * x - x": lambda x: x * x - x,
    "x - x": lambda x: 0,
}


def test_ac4_ocl_properties():
    with criterion(4, f"OCL properties: {CASES} cases each, zero counterexamples"):
        rng = random.Random(SEED)
        failures: list[str] = []
        checked_duality = 0
        for _ in range(CASES):
            values, k = random_collection(rng), rng.randint(*DOMAIN)
            body = rng.choice(PARTIAL_PREDICATES).format(k=k)
            lhs = ev(f"{seq(values)}->forAll(x | {body})")
            rhs = ev(f"not {seq(values)}->exists(x | not ({body}))")
            if lhs is not UNDEFINED and rhs is not UNDEFINED:
                checked_duality += 1
                if lhs is not rhs:
                    failures.append(f"duality {values} {body}")
        for _ in range(CASES):
            values = random_collection(rng)
            key_text = rng.choice(sorted(KEYS))
            keys = [KEYS[key_text](v) for v in values]
            oracle = all(keys[i] != keys[j] for i in range(len(keys)) for j in range(i + 1, len(keys)))
            if ev(f"{seq(values)}->isUnique(x | {key_text})") is not oracle:
                failures.append(f"isUnique {values} {key_text}")
        for _ in range(CASES):
            values, k = random_collection(rng), rng.randint(*DOMAIN)
            body = rng.choice(PREDICATES).format(k=k)
            kept = ev(f"{seq(values)}->select(x | {body})->size()")
            dropped = ev(f"{seq(values)}->reject(x | {body})->size()")
            if kept + dropped != len(values):
                failures.append(f"partition {values} {body}")
        for a, b in itertools.product(TRUTHS, repeat=2):
            if ev(f"{boolean_expr(rng, a)} implies {boolean_expr(rng, b)}") is not IMPLIES[(a, b)]:
                failures.append(f"implies table {a} {b}")
        for _ in range(CASES):
            a, b = rng.choice(TRUTHS), rng.choice(TRUTHS)
            ea, eb = boolean_expr(rng, a), boolean_expr(rng, b)
            if ev(f"{ea} implies {eb}") is not ev(f"(not {ea}) or {eb}"):
                failures.append(f"implies vs not-or {ea} {eb}")
            if ev(f"{ea} implies {eb}") is not OR[(NOT[a], b)]:
                failures.append(f"implies oracle {ea} {eb}")
        for _ in range(CASES):
            x = rng.choice(TRUTHS)
            ex = boolean_expr(rng, x)
            fixed = {
                f"false and {ex}": False,
                f"true or {ex}": True,
                f"false implies {ex}": True,
                f"true and {ex}": AND[(True, x)],
                f"{ex} and false": AND[(x, False)],
                f"{ex} or true": OR[(x, True)],
            }
            for text, expected in fixed.items():
                if ev(text) is not expected:
                    failures.append(f"short circuit {text}")
        assert checked_duality > CASES // 2
        assert failures == [], failures[:5]


def test_ac5_ingestion_counts():
    with criterion(5, "ingestion: 5 objects, 4 processes ordered {1,2,3,4}, 2 classes"):
        tm = caex_to_typemodel(parse_caex(fixture_bytes("DemoProductionProcessesTypemodel.aml")))
        assert len(tm.classes) == 2
        im = caex_to_instancemodel(parse_caex(fixture_bytes("DemoShopfloorInstanceModel.aml")), tm)
        assert len(im.objects) == 5
        processes = all_instances_of(im, "ManufacturingProcess")
        assert len(processes) == 4
        assert {p.slots["processSequenceOrder"] for p in processes} == {1, 2, 3, 4}


def test_ac6_repository_round_trip(tmp_path):
    with criterion(6, "repository round trip: 100 random states, byte-identical attachments"):
        rng = random.Random(SEED)
        total_bytes = 0
        for i in range(100):
            repo = random_repository(rng, max_attachment=64 * 1024)
            target = tmp_path / f"r{i}"
            serialize_repository(repo, target)
            loaded = load_repository(target)
            assert loaded == repo, f"state {i} differs after reload"
            for sm in repo.submodels():
                for element in sm.elements:
                    if isinstance(element, FileElement):
                        assert loaded.get_attachment(sm.id, element.id_short) == element.attachment
                        total_bytes += len(element.attachment)
        assert total_bytes > 0


def test_ac7_http_contract(seeded):
    with criterion(7, "HTTP contract: PATCH visible, 404 NotFound, attachment bytes, run summary"):
        with serve(seeded) as handle:
            url = element_url(handle.url, INFO_SUBMODEL_ID, TEMPERATURE_ID_SHORT)
            assert call_json("GET", url)[1]["value"] == 22.5
            assert call_json("PATCH", f"{url}/value", 45.0)[0] == 200
            assert call_json("GET", url)[1]["value"] == 45.0

            status, doc = call_json("GET", element_url(handle.url, INFO_SUBMODEL_ID, "NoSuchElement"))
            assert (status, doc["code"]) == (404, "NotFound")

            attachment_url = element_url(handle.url, CONSTRAINT_SUBMODEL_ID, "XMI_Instance_Successful") + "/attachment"
            data = random.Random(SEED).randbytes(100_000)
            assert call("PUT", attachment_url, data, {"Content-Type": "application/octet-stream"})[0] == 200
            assert call("GET", attachment_url)[2] == data

            status, report = call_json("POST", f"{handle.url}/validation/run")
            assert status == 200
            persisted = latest_report(seeded, demo_config())
            assert report["summary"] == {
                "satisfied": persisted.summary.satisfied,
                "violated": persisted.summary.violated,
                "undefined": persisted.summary.undefined,
            }
            assert report["summary"]["violated"] == 1


TIMESTAMP = re.compile(r"\d{4}-\d\d-\d\dT\d\d:\d\d:\d\d\.\d{6}Z")


def test_ac8_determinism(capsys, store):
    with criterion(8, "determinism: reports identical except timestamp"):
        cli(capsys, "seed-demo", "--store", str(store), "--variant", "violated")
        captured = []
        for _ in range(2):
            code, text, _ = cli(capsys, "validate", "--store", str(store))
            assert code == 2
            repo = Repository.open(store)
            stored = repo.get_attachment(RESULT_SUBMODEL_ID, "InformationModel_Instance_Result_Json")
            captured.append((TIMESTAMP.sub("<ts>", text).encode(), TIMESTAMP.sub("<ts>", stored.decode()).encode()))
        assert captured[0] == captured[1]
        assert b"<ts>" in captured[0][1] and json.loads(captured[0][1])["summary"]["violated"] == 3


def _tree(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file() and p.name != ".ovc.lock"}


def test_ac9_atomicity(capsys, store):
    with criterion(9, "atomicity: broken constraint file gives exit 1, results unchanged"):
        cli(capsys, "seed-demo", "--store", str(store))
        assert cli(capsys, "validate", "--store", str(store))[0] == 0
        repo = Repository.open(store)
        repo.put_attachment(CONSTRAINT_SUBMODEL_ID, "Constraint_Model", b"context ShopFloor inv broken: (1 +")
        before = repo.get_submodel(RESULT_SUBMODEL_ID)
        files_before = _tree(store)
        code, _, err = cli(capsys, "validate", "--store", str(store))
        assert code == 1 and "step 4" in err
        assert Repository.open(store).get_submodel(RESULT_SUBMODEL_ID) == before
        assert _tree(store) == files_before


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
