import os
from pathlib import Path

import jsonschema
import pytest

import scatterbd as sbd

TESTS = Path(os.environ.get("SBD_TEST_DIR", Path(__file__).resolve().parents[2] / "tests"))
PAIR = TESTS / "data" / "i_pair.cspb"
LANGS = ["@horn3", "@dualhorn3"]


@pytest.fixture(scope="module")
def pair():
    return sbd.read(str(PAIR))


def test_document(pair):
    assert pair.variables == ["x1", "x2", "x3", "x4", "x5"]
    assert pair.num_constraints == 2
    assert pair.domain == 2
    assert pair.languages == ["G1", "G2"]
    assert pair.planted is None
    assert sbd.parse(pair.serialize()).serialize() == pair.serialize()


def test_detect_verify_count(pair):
    schema = sbd.schema()
    r = sbd.detect(pair, 1, LANGS)
    jsonschema.validate(r, schema)
    assert r["status"] == "found" and r["backdoor"] == ["x3"]
    assert sbd.detect(pair, 0)["status"] == "none"
    v = sbd.verify(pair, ["x1"], LANGS)
    jsonschema.validate(v, schema)
    assert v["witness"] == {"constraints": ["C1", "C2"], "tau": {"x1": 1}}
    c = sbd.count(pair, 1)
    assert c["count"] == "24"
    assert sbd.count(pair, backdoor=["x3"])["count"] == "24"
    assert sbd.solve(pair, 0)["status"] == "none"
    assert sbd.oracle_count(pair) == 24
    assert sbd.oracle_decide(pair)
    assert sbd.oracle_detect(pair, 1, LANGS) == ["x3"]


def test_generate_and_recover():
    doc = sbd.generate(5, bridges=2, block_vars=20, block_cons=24)
    assert doc.planted == ["b1", "b2"]
    assert sbd.verify(doc, doc.planted)["status"] == "ok"
    r = sbd.detect(doc, 2, threads=2)
    assert r["status"] == "found" and len(r["backdoor"]) <= 2
    assert sbd.generate(5, bridges=2).serialize() == sbd.generate(5, bridges=2).serialize()


def test_errors():
    with pytest.raises(sbd.ParseError, match="line 4"):
        sbd.parse("csp 1\ndomain 2\nvar x\nrel R 1 { 3 }\n")
    doc = sbd.parse("csp 1\ndomain 2\nvar x\n")
    with pytest.raises(sbd.Error):
        sbd.detect(doc, 1)
    with pytest.raises(ValueError):
        sbd.verify(sbd.read(str(PAIR)), ["nope"])
