import random

import numpy as np
import pytest

from toprorec import (
    InterestTopic,
    build_knowledge_map,
    build_topic_program_matrix,
    matrix_from_csv,
    matrix_to_csv,
)
from toprorec.matrix import MatrixError, TopicProgramMatrix, case_study_program_names
from conftest import GOLDEN_SELECTION
from oracles import naive_matrix_counts, random_instance


def test_build_matches_naive_triple_loop():
    rng = random.Random(17)
    for _ in range(25):
        instance = random_instance(rng)
        catalog = instance.to_catalog()
        kmap = build_knowledge_map(catalog)
        topics = instance.to_topics()
        matrix = build_topic_program_matrix(catalog, kmap, topics)
        expected = naive_matrix_counts(instance)
        for t_idx, tid in enumerate(matrix.topic_ids):
            for p_idx, pid in enumerate(matrix.program_ids):
                assert matrix.counts[t_idx, p_idx] == expected[tid][pid]


def test_zero_column_for_unmatched_topic():
    rng = random.Random(3)
    instance = random_instance(rng)
    catalog = instance.to_catalog()
    kmap = build_knowledge_map(catalog)
    topics = instance.to_topics() + [
        InterestTopic(id=99, keywords=(("zzz-not-present", 1.0),))
    ]
    matrix = build_topic_program_matrix(catalog, kmap, topics)
    assert not matrix.counts[matrix.topic_index(99)].any()


def test_counts_bounded_by_gamma_times_p():
    rng = random.Random(29)
    for _ in range(10):
        instance = random_instance(rng)
        catalog = instance.to_catalog()
        matrix = build_topic_program_matrix(
            catalog, build_knowledge_map(catalog), instance.to_topics()
        )
        gamma = max(len(t) for t in instance.topics.values())
        bound = gamma * matrix.courses_per_program
        assert np.all(matrix.counts <= bound[np.newaxis, :])


def test_golden_fixture_data_science_row(golden_matrix):
    j = golden_matrix.program_index("data-science")
    got = [
        int(golden_matrix.counts[golden_matrix.topic_index(t), j])
        for t in GOLDEN_SELECTION
    ]
    assert got == [11, 19, 30, 42, 11]
    assert int(golden_matrix.courses_per_program[j]) == 21


def test_golden_fixture_shape(golden_matrix):
    assert golden_matrix.h == 30
    assert golden_matrix.n == 84
    assert golden_matrix.topic_ids == tuple(range(1, 31))
    # keyword budget: every count fits within gamma=20 hits per course
    bound = 20 * golden_matrix.courses_per_program
    assert np.all(golden_matrix.counts <= bound[np.newaxis, :])


def test_fixture_program_names_cover_matrix(golden_matrix):
    names = case_study_program_names()
    assert set(names) == set(golden_matrix.program_ids)
    assert names["data-science"] == "Data Science"
    assert names["management-and-human-resources"] == "Management and Human Resources"


def test_csv_round_trip(tmp_path, golden_matrix):
    path = tmp_path / "matrix.csv"
    matrix_to_csv(golden_matrix, path)
    again = matrix_from_csv(path)
    assert again == golden_matrix
    assert matrix_to_csv(again) == matrix_to_csv(golden_matrix)


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("nope,1,2\nx,1,2\n")
    with pytest.raises(MatrixError):
        matrix_from_csv(path)


def test_csv_rejects_ragged_rows(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("program,1,|p|\np1,3\n")
    with pytest.raises(MatrixError):
        matrix_from_csv(path)


def test_csv_rejects_non_integer(tmp_path):
    path = tmp_path / "float.csv"
    path.write_text("program,1,|p|\np1,1.5,2\n")
    with pytest.raises(MatrixError):
        matrix_from_csv(path)


def test_matrix_validation():
    with pytest.raises(MatrixError, match="at least one course"):
        TopicProgramMatrix(
            topic_ids=(1,),
            program_ids=("p1",),
            counts=np.array([[0]], dtype=np.int64),
            courses_per_program=np.array([0], dtype=np.int64),
        )
    with pytest.raises(MatrixError, match="negative"):
        TopicProgramMatrix(
            topic_ids=(1,),
            program_ids=("p1",),
            counts=np.array([[-1]], dtype=np.int64),
            courses_per_program=np.array([1], dtype=np.int64),
        )
    with pytest.raises(MatrixError, match="duplicate program"):
        TopicProgramMatrix(
            topic_ids=(1,),
            program_ids=("p1", "p1"),
            counts=np.array([[0, 0]], dtype=np.int64),
            courses_per_program=np.array([1, 1], dtype=np.int64),
        )


def test_counts_are_read_only(golden_matrix):
    with pytest.raises(ValueError):
        golden_matrix.counts[0, 0] = 5
