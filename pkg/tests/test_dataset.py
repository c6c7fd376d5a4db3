"""Dataset serialization, validation errors, and project-level splitting."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codemend.corpus import (
    DatasetError,
    DebugSample,
    dataset_stats,
    read_dataset,
    sample_from_record,
    split_by_project,
    write_dataset,
)
from codemend.patterns import BugPattern


def make_sample(i=0, buggy=True, project="projA"):
    before = [f"int x{i} = {i};", "return x;"]
    if buggy:
        after = [f"int x{i} = {i + 1};", "return x;"]
        return DebugSample(before, after, [1, 0], 1,
                           pattern=BugPattern.CHANGE_NUMERAL,
                           project=project, commit_id=f"c{i}", commit_msg="fix init")
    return DebugSample(before, before, [0, 0], 0,
                       project=project, commit_id=f"c{i}", commit_msg="fix init")


def test_roundtrip_three_samples(tmp_path):
    samples = [make_sample(0), make_sample(1, buggy=False), make_sample(2, project="projB")]
    path = tmp_path / "d.ndjson"
    assert write_dataset(samples, str(path)) == 3
    back = read_dataset(str(path))
    assert back == samples


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 50), st.booleans(), st.sampled_from(["p1", "p2", "p3"])),
        max_size=6,
    )
)
def test_roundtrip_property(tmp_path_factory, entries):
    samples = [make_sample(i, b, p) for i, b, p in entries]
    path = tmp_path_factory.mktemp("ds") / "d.ndjson"
    write_dataset(samples, str(path))
    assert read_dataset(str(path)) == samples


def test_missing_field_error_names_field(tmp_path):
    record = {
        "before": "a;", "after": "a;", "buggy_lines": [], "label": 0,
        "pattern": None, "project": "p", "commit_id": "c", "commit_msg": "m",
    }
    del record["before"]
    path = tmp_path / "d.ndjson"
    path.write_text(json.dumps(record) + "\n")
    with pytest.raises(DatasetError, match="missing field: before"):
        read_dataset(str(path))


def test_malformed_record_error_names_line(tmp_path):
    good = {
        "before": "a;", "after": "a;", "buggy_lines": [], "label": 0,
        "pattern": None, "project": "p", "commit_id": "c", "commit_msg": "m",
    }
    path = tmp_path / "d.ndjson"
    path.write_text(json.dumps(good) + "\n{oops\n")
    with pytest.raises(DatasetError, match="line 2"):
        read_dataset(str(path))


def test_commit_provenance_record_parses():
    # the dataset record shape: before/after texts, buggy line number,
    # commit message + id + project
    record = {
        "before": "int f() {\n  return a;\n}",
        "after": "int f() {\n  return b;\n}",
        "buggy_lines": [1],
        "label": 1,
        "pattern": "CHANGE_IDENTIFIER",
        "project": "apache/druid",
        "commit_id": "7ebe053ac1abce6e",
        "commit_msg": "Minor fix in polyglot native API",
    }
    s = sample_from_record(record)
    assert s.function_label == 1
    assert s.buggy_line_indices == [1]
    assert s.pattern is BugPattern.CHANGE_IDENTIFIER
    assert s.project == "apache/druid"
    assert s.commit_id == "7ebe053ac1abce6e"


def test_label_line_consistency_enforced():
    with pytest.raises(DatasetError):
        DebugSample(["a;"], ["a;"], [1], 0)
    with pytest.raises(DatasetError):
        DebugSample(["a;"], ["b;"], [0], 1)
    with pytest.raises(DatasetError):
        DebugSample(["a;"], ["b;"], [0, 1], 1)
    with pytest.raises(DatasetError):  # clean sample must keep after == before
        DebugSample(["a;"], ["b;"], [0], 0)
    with pytest.raises(DatasetError):  # pattern on a multi-line sample
        DebugSample(["a;", "b;"], ["c;", "d;"], [1, 1], 1, pattern=BugPattern.CHANGE_OPERATOR)


# ---------------- splitting ----------------

def _corpus_over_projects(n_projects, per_project=3):
    samples = []
    for p in range(n_projects):
        for i in range(per_project):
            samples.append(make_sample(i, project=f"proj{p:02d}"))
    return samples


def test_split_ratios_at_project_granularity():
    samples = _corpus_over_projects(10)
    train, val, test = split_by_project(samples, (0.8, 0.1, 0.1), seed=3)
    projects = lambda split: {s.project for s in split}
    assert len(projects(train)) == 8
    assert len(projects(val)) == 1
    assert len(projects(test)) == 1
    assert len(train) + len(val) + len(test) == len(samples)


def test_split_projects_are_disjoint():
    samples = _corpus_over_projects(7)
    splits = split_by_project(samples, (0.5, 0.25, 0.25), seed=0)
    sets = [{s.project for s in split} for split in splits]
    assert not (sets[0] & sets[1]) and not (sets[0] & sets[2]) and not (sets[1] & sets[2])


def test_split_deterministic_for_seed():
    samples = _corpus_over_projects(9)
    a = split_by_project(samples, (0.6, 0.2, 0.2), seed=42)
    b = split_by_project(samples, (0.6, 0.2, 0.2), seed=42)
    assert a == b
    c = split_by_project(samples, (0.6, 0.2, 0.2), seed=43)
    assert a != c


def test_split_fewer_projects_than_splits_rejected():
    samples = _corpus_over_projects(2)
    with pytest.raises(DatasetError):
        split_by_project(samples, (0.8, 0.1, 0.1), seed=0)


def test_split_ratios_must_sum_to_one():
    samples = _corpus_over_projects(5)
    with pytest.raises(DatasetError):
        split_by_project(samples, (0.5, 0.2, 0.2), seed=0)


def test_dataset_stats_reports_projects_and_instances():
    splits = {
        "train": _corpus_over_projects(4, per_project=5),
        "val": _corpus_over_projects(2, per_project=2),
    }
    stats = dataset_stats(splits)
    assert stats["train"]["projects"] == 4
    assert stats["train"]["instances"] == 20
    assert stats["val"]["projects"] == 2
    assert stats["val"]["instances"] == 4
    assert stats["train"]["patterns"]["CHANGE_NUMERAL"] == 20
