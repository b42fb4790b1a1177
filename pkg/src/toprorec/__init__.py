"""Topic-based study program recommender.

Mines interest topics from course descriptions, scores programs over the
course-program knowledge map for a user's topic selection, and ships the
evaluation toolkit (reachability, personalization, coverage) plus an
HTTP service and CLI around the engine.
"""

from .catalog import (
    Catalog,
    CatalogError,
    CatalogValidationError,
    Course,
    KnowledgeMap,
    Program,
    build_knowledge_map,
    load_catalog,
    save_catalog,
)
from .cleaning import CleaningConfig, clean_description, extract_keywords
from .evaluate import (
    CoverageReport,
    DegenerateMatrixError,
    InfeasibleParameterError,
    PersonalizationResult,
    ReachabilityResult,
    RecommendationMatrix,
    coverage_report,
    personalization,
    reachability,
    reachability_grid,
)
from .matrix import (
    TopicProgramMatrix,
    build_topic_program_matrix,
    case_study_matrix,
    case_study_program_names,
    matrix_from_csv,
    matrix_to_csv,
)
from .recommend import (
    EmptySelectionError,
    RankedProgram,
    Recommendation,
    RecommendError,
    SelectionTooLargeError,
    TopicScoreTable,
    UnknownProgramError,
    UnknownTopicError,
    recommend,
    topic_scores,
)
from .snapshot import Snapshot, build_snapshot, load_snapshot, save_snapshot
from .topics import (
    InterestTopic,
    TopicError,
    TopicModelConfig,
    TopicValidationError,
    cluster,
    ctfidf_keywords,
    export_topics,
    import_topics,
    mine_topics,
    vectorize,
)

__version__ = "0.1.0"
