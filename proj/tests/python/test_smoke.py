import json
import os
import pathlib

import pytest

import soupgen_core


@pytest.fixture(scope="module")
def fixtures_dir():
    d = os.environ.get("SOUP_FIXTURES")
    if not d:
        pytest.skip("SOUP_FIXTURES not set")
    return pathlib.Path(d)


@pytest.fixture(scope="module")
def generated(fixtures_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("listing1")
    res = soupgen_core.generate(
        str(fixtures_dir / "listing1"),
        "process_record",
        out_dir=str(out),
        scope_depth=2,
    )
    assert res["exit_code"] == soupgen_core.EXIT_OK, res["stderr"]
    return out


def test_generate_artifacts(generated):
    for name in ("stage1.proof", "stage2.proof", "stage3.proof",
                 "errors.json", "metrics.json", "stage_log.json"):
        assert (generated / name).is_file()
    errors = json.loads((generated / "errors.json").read_text())
    assert len(errors["errors"]) == 1
    assert errors["errors"][0]["kind"] == "oob-pointer-deref"


def test_verify_roundtrip(fixtures_dir, generated):
    res = soupgen_core.verify(
        str(fixtures_dir / "listing1"), str(generated / "stage3.proof")
    )
    assert res["exit_code"] == soupgen_core.EXIT_OK, res["stderr"]
    report = json.loads(res["report_json"])
    assert report["status"] == "violations-found"


def test_expose_lookup(generated):
    res = soupgen_core.expose(
        str(generated / "errors.json"), "main.mc:10:oob-pointer-deref"
    )
    assert res["exit_code"] == soupgen_core.EXIT_OK
    assert json.loads(res["verdict_json"])["verdict"] == "exposed"

    bad = soupgen_core.expose(str(generated / "errors.json"), "not-a-sink")
    assert bad["exit_code"] == soupgen_core.EXIT_INPUT


def test_missing_entry_is_input_error(fixtures_dir, tmp_path):
    res = soupgen_core.generate(
        str(fixtures_dir / "listing1"), "no_such_entry", out_dir=str(tmp_path)
    )
    assert res["exit_code"] == soupgen_core.EXIT_INPUT


def test_check_kinds():
    kinds = soupgen_core.check_kinds()
    assert len(kinds) == 20
    assert "oob-pointer-deref" in kinds
    assert "double-free" in kinds


def test_manifest_roundtrip(generated):
    text = (generated / "stage3.proof").read_text()
    assert soupgen_core.manifest_roundtrip(text) == text
