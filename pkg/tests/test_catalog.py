import json
import random

import pytest

from toprorec import (
    Catalog,
    CatalogError,
    CatalogValidationError,
    CleaningConfig,
    Course,
    Program,
    build_knowledge_map,
    build_snapshot,
    load_catalog,
    load_snapshot,
    save_catalog,
    save_snapshot,
)
from oracles import random_instance


def write_catalog(tmp_path, doc, name="catalog.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def minimal_doc():
    return {
        "programs": [{"id": "p1", "name": "P", "college": "X", "courses": ["c1"]}],
        "courses": [{"id": "c1", "name": "C", "description": "vector calculus"}],
    }


def test_minimal_catalog(tmp_path, plain_cleaning):
    catalog = load_catalog(write_catalog(tmp_path, minimal_doc()), cleaning=plain_cleaning)
    assert catalog.n == 1
    assert catalog.m == 1
    kmap = build_knowledge_map(catalog)
    assert kmap.edge_count == 1
    assert kmap.edges == frozenset({("c1", "p1")})


def test_courses_are_cleaned_at_load(toy_catalog):
    c1 = toy_catalog.course("c1")
    assert "forces" in c1.cleaned_keywords
    assert "and" not in c1.cleaned_keywords  # stop word
    assert c1.raw_description.startswith("Forces")


def test_duplicate_program_id(tmp_path):
    doc = minimal_doc()
    doc["programs"].append(dict(doc["programs"][0]))
    with pytest.raises(CatalogValidationError, match="duplicate program"):
        load_catalog(write_catalog(tmp_path, doc))


def test_duplicate_course_id(tmp_path):
    doc = minimal_doc()
    doc["courses"].append(dict(doc["courses"][0]))
    with pytest.raises(CatalogValidationError, match="duplicate course"):
        load_catalog(write_catalog(tmp_path, doc))


def test_dangling_course_reference(tmp_path):
    doc = minimal_doc()
    doc["programs"][0]["courses"] = ["missing"]
    with pytest.raises(CatalogValidationError, match="unknown course"):
        load_catalog(write_catalog(tmp_path, doc))


def test_empty_program(tmp_path):
    doc = minimal_doc()
    doc["programs"][0]["courses"] = []
    with pytest.raises(CatalogValidationError, match="no courses"):
        load_catalog(write_catalog(tmp_path, doc))


def test_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(CatalogError):
        load_catalog(path)


def test_missing_top_level_keys(tmp_path):
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps({"programs": []}))
    with pytest.raises(CatalogError):
        load_catalog(path)


def test_duplicate_course_names_allowed(tmp_path):
    # names need not be unique; identity is the id
    doc = minimal_doc()
    doc["courses"].append({"id": "c2", "name": "C", "description": "same name"})
    doc["programs"][0]["courses"] = ["c1", "c2"]
    catalog = load_catalog(write_catalog(tmp_path, doc))
    assert catalog.m == 2


def test_csv_load_matches_json(tmp_path, plain_cleaning):
    (tmp_path / "programs.csv").write_text(
        "id,name,college\nmech,Mechanics,Engineering\nphil,Philosophy,Arts\n"
    )
    (tmp_path / "courses.csv").write_text(
        'id,name,description\nc1,Statics,"Forces and torque."\nc2,Ethics,"Moral reasoning."\n'
    )
    (tmp_path / "edges.csv").write_text(
        "course_id,program_id\nc1,mech\nc2,phil\nc1,phil\n"
    )
    catalog = load_catalog(tmp_path, format="csv", cleaning=plain_cleaning)
    doc = {
        "programs": [
            {"id": "mech", "name": "Mechanics", "college": "Engineering", "courses": ["c1"]},
            {"id": "phil", "name": "Philosophy", "college": "Arts", "courses": ["c2", "c1"]},
        ],
        "courses": [
            {"id": "c1", "name": "Statics", "description": "Forces and torque."},
            {"id": "c2", "name": "Ethics", "description": "Moral reasoning."},
        ],
    }
    expected = load_catalog(write_catalog(tmp_path, doc), cleaning=plain_cleaning)
    assert catalog == expected


def test_save_load_round_trip(toy_catalog, tmp_path, plain_cleaning):
    path = tmp_path / "again.json"
    save_catalog(toy_catalog, path)
    reloaded = load_catalog(path, cleaning=plain_cleaning)
    assert reloaded == toy_catalog
    # serialization is deterministic
    assert save_catalog(reloaded) == save_catalog(toy_catalog)


def test_knowledge_map_complete_bipartite(toy_catalog):
    kmap = build_knowledge_map(toy_catalog)
    # mech x {c1,c2}, phil x {c3}, robo x {c1,c2,c3}
    assert kmap.edge_count == 6
    assert kmap.course_to_programs["c1"] == ("mech", "robo")
    assert kmap.program_to_courses["robo"] == ("c1", "c2", "c3")
    assert kmap.n == 3 and kmap.m == 3


def test_two_programs_sharing_three_courses():
    courses = tuple(
        Course(id=f"c{i}", name=f"c{i}", raw_description="", keywords=())
        for i in range(3)
    )
    programs = tuple(
        Program(id=f"p{j}", name=f"p{j}", college="", course_ids=("c0", "c1", "c2"))
        for j in range(2)
    )
    kmap = build_knowledge_map(Catalog(programs=programs, courses=courses))
    assert kmap.edge_count == 6


def test_knowledge_map_referential_integrity_and_recount():
    rng = random.Random(7)
    for _ in range(20):
        instance = random_instance(rng)
        catalog = instance.to_catalog()
        kmap = build_knowledge_map(catalog)
        # brute-force recount over program lists
        expected_edges = {
            (cid, pid) for pid, cids in instance.programs.items() for cid in cids
        }
        assert kmap.edges == frozenset(expected_edges)
        assert kmap.edge_count == sum(p.size for p in catalog.programs)
        course_ids = {c.id for c in catalog.courses}
        program_ids = {p.id for p in catalog.programs}
        for cid, pid in kmap.edges:
            assert cid in course_ids and pid in program_ids
        for pid, cids in kmap.program_to_courses.items():
            assert len(cids) == catalog.program(pid).size


def test_case_study_scale_shape():
    # 84 programs, 4251 courses, one course eligible in 22 programs
    courses = tuple(
        Course(id=f"c{i:04d}", name="x", raw_description="", keywords=())
        for i in range(4251)
    )
    shared = "c0000"
    programs = []
    for j in range(84):
        ids = {f"c{(37 * j + k) % 4250 + 1:04d}" for k in range(50)}
        if j < 22:
            ids.add(shared)
        programs.append(
            Program(id=f"p{j:02d}", name="p", college="", course_ids=tuple(sorted(ids)))
        )
    catalog = Catalog(programs=tuple(programs), courses=courses)
    assert catalog.n == 84
    assert catalog.m == 4251
    kmap = build_knowledge_map(catalog)
    assert len(kmap.course_to_programs[shared]) == 22


def test_snapshot_round_trip(toy_catalog, tmp_path, plain_cleaning):
    snapshot = build_snapshot(toy_catalog)
    path = tmp_path / "snap.json"
    first = save_snapshot(snapshot, path, cleaning=plain_cleaning)
    loaded = load_snapshot(path)
    assert loaded.catalog == toy_catalog
    assert loaded.knowledge_map == snapshot.knowledge_map
    # byte-identical on re-save
    assert save_snapshot(loaded, cleaning=plain_cleaning) == first


def test_snapshot_rejects_other_files(tmp_path):
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"format": "something-else"}))
    with pytest.raises(CatalogError):
        load_snapshot(path)
