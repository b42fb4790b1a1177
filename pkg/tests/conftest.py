import json

import pytest

from toprorec import CleaningConfig, case_study_matrix, load_catalog


@pytest.fixture(scope="session")
def golden_matrix():
    return case_study_matrix()


GOLDEN_SELECTION = [2, 19, 21, 23, 30]

GOLDEN_RANKING = [
    # (program id, |p|, PIS, R-PIS, SCORE) as published for the worked example
    ("data-science", 21, 113, 5.381, 100.0),
    ("bioinformatics", 16, 86, 5.375, 99.9),
    ("industrial-engineering", 102, 546, 5.353, 99.5),
    ("management-and-human-resources", 14, 73, 5.214, 96.9),
    ("manufacturing-engineering", 115, 585, 5.087, 94.5),
    ("industrial-technology", 27, 135, 5.000, 92.9),
    ("computer-science", 176, 822, 4.670, 86.8),
]


@pytest.fixture
def plain_cleaning():
    """No blacklist, tiny stop list; keeps tests self-describing."""
    return CleaningConfig(
        stopwords=frozenset({"the", "a", "an", "and", "of", "to", "in", "is"}),
        blacklist=(),
        ngram_max=2,
    )


TOY_CATALOG = {
    "programs": [
        {
            "id": "mech",
            "name": "Mechanics",
            "college": "Engineering",
            "courses": ["c1", "c2"],
        },
        {
            "id": "phil",
            "name": "Philosophy",
            "college": "Arts",
            "courses": ["c3"],
        },
        {
            "id": "robo",
            "name": "Robotics",
            "college": "Engineering",
            "courses": ["c1", "c2", "c3"],
        },
    ],
    "courses": [
        {"id": "c1", "name": "Statics", "description": "Forces and torque in rigid bodies."},
        {"id": "c2", "name": "Dynamics", "description": "Motion of particles. Energy and momentum."},
        {"id": "c3", "name": "Ethics", "description": "Moral reasoning and virtue. The good life."},
    ],
}


@pytest.fixture
def toy_catalog_path(tmp_path):
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(TOY_CATALOG))
    return path


@pytest.fixture
def toy_catalog(toy_catalog_path, plain_cleaning):
    return load_catalog(toy_catalog_path, cleaning=plain_cleaning)
