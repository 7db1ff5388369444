import json
import os
import pathlib

import pytest

import knowcat

DATA = pathlib.Path(os.environ.get("KNOWCAT_TEST_DATA_DIR", pathlib.Path(__file__).parents[1] / "data"))
GOLDEN = DATA / "golden"


def test_normalize_and_match():
    assert knowcat.normalize_answer("  Jupiter. ") == "jupiter"
    assert knowcat.normalize_answer("The Jupiter") == "jupiter"
    assert knowcat.is_correct("Reasoning...\nAnswer: Jupiter", "jupiter", style="cot")
    assert not knowcat.is_correct("Saturn", "Jupiter")


def test_confidence_values():
    assert knowcat.confidence(["Mars", "Venus", "Jupiter", "Saturn", "Neptune"]) == pytest.approx(0.2)
    assert knowcat.confidence(["Saturn", "Mars", "Saturn", "Jupiter", "Mars"]) == pytest.approx(0.4)
    with pytest.raises(knowcat.KnowcatError):
        knowcat.confidence(["Mars"])


def test_classify_rows():
    r = knowcat.classify("Saturn", ["Saturn", "Mars", "Saturn", "Mars", "Venus", "Earth"], "Jupiter")
    assert r["category"] == "MU"
    assert r["confidence"] == pytest.approx(1 / 3)
    r = knowcat.classify("Jupiter", ["Jupiter"] * 6, "Jupiter")
    assert r["category"] == "HK"
    assert r["confidence"] is None


def test_score_and_transitions():
    assert knowcat.category_score([0.6, 0.4, 0, 0, 0, 0]) == pytest.approx(5.6, abs=1e-12)
    counts = [[0] * 6 for _ in range(6)]
    counts[5][0] = 2
    assert knowcat.transition_ratios(counts) == {"upgrade": 1.0, "downgrade": 0.0, "stable": 0.0}
    with pytest.raises(ValueError):
        knowcat.transition_ratios([[1]])


def test_golden_snapshot_roundtrip(tmp_path):
    out = knowcat.classify_snapshot(GOLDEN / "base", str(GOLDEN / "dataset.jsonl"), tmp_path / "base")
    assert out["n_records"] == 10
    assert out["accuracy"] == pytest.approx(0.4)
    assert (tmp_path / "base" / "metrics.json").read_text() == (GOLDEN / "expected/base/metrics.json").read_text()
    knowcat.classify_snapshot(GOLDEN / "cot", str(GOLDEN / "dataset.jsonl"), tmp_path / "cot")
    ratios = knowcat.compare(
        str(tmp_path / "base/classification.jsonl"), str(tmp_path / "cot/classification.jsonl"), tmp_path / "cmp"
    )
    assert ratios["upgrade"] == pytest.approx(0.6)


def test_mock_sampling(tmp_path):
    data = tmp_path / "data.jsonl"
    mock = tmp_path / "mock.jsonl"
    data.write_text("".join(json.dumps({"id": f"q{i}", "question": f"Q{i}?", "answer": "gold"}) + "\n" for i in range(5)))
    mock.write_text(
        "".join(
            json.dumps({"record_id": f"q{i}", "greedy": "gold", "distribution": [{"answer": "gold", "p": 1.0}]}) + "\n"
            for i in range(5)
        )
    )
    summary = knowcat.sample_mock(str(data), str(mock), tmp_path / "snap")
    assert summary == {"total": 5, "cached": 0, "queried": 5, "failures": 0}
    out = knowcat.classify_snapshot(tmp_path / "snap")
    assert out["category_score"] == 6.0
    with pytest.raises(ValueError):
        knowcat.sample_mock(str(tmp_path / "missing.jsonl"), str(mock), tmp_path / "x")
