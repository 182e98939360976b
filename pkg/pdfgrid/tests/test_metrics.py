import pytest

from pdfgrid.metrics import MetricsError, derive_artifacts, evaluate


def _doc(doc_id, tokens, adjacency, headers):
    return {"id": doc_id, "tokens": tokens, "adjacency": adjacency, "headers": headers}


GT = {
    "documents": [
        _doc(
            "d1",
            ["City", "Pop", "Paris", "123"],
            [
                ["City", "Pop", "H"],
                ["City", "Paris", "V"],
                ["Pop", "123", "V"],
                ["Paris", "123", "H"],
            ],
            [
                {"cell": "Paris", "headers": ["City"]},
                {"cell": "123", "headers": ["Pop"]},
            ],
        )
    ]
}


def test_identity_gives_all_ones():
    result = evaluate(GT, GT)
    for metric in ("REC", "STR", "INT_strict", "INT_partial"):
        assert result[metric] == {"precision": 1.0, "recall": 1.0, "f1": 1.0}


def test_missing_adjacency_pair_halves_recall():
    # two ground-truth pairs, the extraction found only one of them
    gt = {
        "documents": [
            _doc("d", ["a", "b", "c"], [["a", "b", "H"], ["b", "c", "H"]], [])
        ]
    }
    ex = {"documents": [_doc("d", ["a", "b", "c"], [["a", "b", "H"]], [])]}
    result = evaluate(gt, ex)
    assert result["STR"]["recall"] == 0.5
    assert result["STR"]["precision"] == 1.0
    # hand-computed harmonic mean: 2 * 1 * 0.5 / 1.5 = 2/3
    assert result["STR"]["f1"] == pytest.approx(2 / 3)


def test_wrong_header_parent_drops_int_not_rec():
    wrong = {
        "documents": [
            _doc(
                "d1",
                ["City", "Pop", "Paris", "123"],
                [
                    ["City", "Pop", "H"],
                    ["City", "Paris", "V"],
                    ["Pop", "123", "V"],
                    ["Paris", "123", "H"],
                ],
                [
                    {"cell": "Paris", "headers": ["Pop"]},  # wrong parent
                    {"cell": "123", "headers": ["Pop"]},
                ],
            )
        ]
    }
    result = evaluate(GT, wrong)
    assert result["REC"]["f1"] == 1.0  # recognition unaffected
    assert result["INT_strict"]["precision"] == 0.5
    assert result["INT_partial"]["precision"] == 0.5


def test_partial_vs_strict_header_matching():
    gt = {
        "documents": [
            _doc("d", [], [], [{"cell": "42", "headers": ["col", "row"]}])
        ]
    }
    half = {
        "documents": [
            _doc("d", [], [], [{"cell": "42", "headers": ["col"]}])
        ]
    }
    result = evaluate(gt, half)
    assert result["INT_strict"]["precision"] == 0.0  # set differs
    assert result["INT_partial"]["precision"] == 1.0  # the one pair is right
    assert result["INT_partial"]["recall"] == 0.5


def test_micro_average_over_documents():
    gt = {
        "documents": [
            _doc("a", ["x"] * 3, [], []),
            _doc("b", ["y"] * 1, [], []),
        ]
    }
    ex = {
        "documents": [
            _doc("a", ["x"] * 3, [], []),
            _doc("b", ["z"], [], []),
        ]
    }
    result = evaluate(gt, ex)
    # micro: 3 of 4 tokens correct, not the mean of the per-document scores
    assert result["REC"]["precision"] == 0.75
    assert result["REC"]["recall"] == 0.75


def test_bounds_and_empty_extraction():
    ex = {"documents": [_doc("d1", [], [], [])]}
    result = evaluate(GT, ex)
    for metric in result.values():
        assert 0.0 <= metric["precision"] <= 1.0
        assert 0.0 <= metric["recall"] <= 1.0
        assert 0.0 <= metric["f1"] <= 1.0
    assert result["REC"]["recall"] == 0.0
    assert result["REC"]["f1"] == 0.0


def test_schema_mismatch_errors():
    with pytest.raises(MetricsError):
        evaluate({"documents": [{"id": "d", "tokens": []}]}, GT)
    with pytest.raises(MetricsError):
        evaluate(GT, {"documents": [{"id": "other", "tables": []}]})
    with pytest.raises(MetricsError):
        evaluate({"nope": 1}, GT)
    bad_adjacency = {
        "documents": [_doc("d1", [], [["a", "b", "DIAGONAL"]], [])]
    }
    with pytest.raises(MetricsError):
        evaluate(bad_adjacency, bad_adjacency)


def test_derive_artifacts_from_grid():
    tables = [
        {
            "cells": [["City", "Pop"], ["Paris", "123"], ["", "45"]],
            "headerRows": 1,
            "headerCols": 0,
        }
    ]
    artifacts = derive_artifacts(tables)
    assert artifacts["tokens"] == ["City", "Pop", "Paris", "123", "45"]
    # nearest non-empty neighbors: 45's left neighbor is empty, so no H pair
    # from the empty cell; vertical 123 -> 45 skips nothing
    assert ("Paris", "123", "H") in artifacts["adjacency"]
    assert ("123", "45", "V") in artifacts["adjacency"]
    assert ("City", "Paris", "V") in artifacts["adjacency"]
    headers = {entry["cell"]: entry["headers"] for entry in artifacts["headers"]}
    assert headers["Paris"] == ["City"]
    assert headers["123"] == ["Pop"]
    assert headers["45"] == ["Pop"]


def test_extracted_side_accepts_tables_records():
    ex = {
        "documents": [
            {
                "id": "d1",
                "tables": [
                    {
                        "cells": [["City", "Pop"], ["Paris", "123"]],
                        "headerRows": 1,
                        "headerCols": 0,
                    }
                ],
            }
        ]
    }
    result = evaluate(GT, ex)
    assert result["REC"]["precision"] == 1.0
    assert result["REC"]["recall"] == 1.0
