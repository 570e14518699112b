"""Archive-scale semiotic trait scoring and retrieval engine."""

from .archive import Archive, Distribution, RankedEntry, RankedList, build
from .matching import CostMatrix, MatchResult, linear_sum_assignment, match_instances
from .records import (
    EmbeddingTable,
    GlobalMeasures,
    ImageRecord,
    InstanceAnnotation,
    Violation,
    load_embedding_table,
    load_records,
    parse_record,
    save_records,
    serialize_record,
    validate_archive,
)
from .registry import MeasureDescriptor, Registry, default_registry, load_registry
from .scoring import (
    PairScore,
    ScoreBreakdown,
    ScoreNode,
    Scorer,
    WeightConfig,
    fresco_score,
    level_score,
    measure_score,
)
from .synth import SynthResult, make_embedding_table, synthesize
from .traits import (
    ThresholdConfig,
    TraitVector,
    centroid_ratios,
    classify_centrality,
    classify_framing,
    derive_traits,
    discretize_group_size,
    discretize_position,
)

__version__ = "0.1.0"

__all__ = [
    "Archive", "Distribution", "RankedEntry", "RankedList", "build",
    "CostMatrix", "MatchResult", "linear_sum_assignment", "match_instances",
    "EmbeddingTable", "GlobalMeasures", "ImageRecord", "InstanceAnnotation",
    "Violation", "load_embedding_table", "load_records", "parse_record",
    "save_records", "serialize_record", "validate_archive",
    "MeasureDescriptor", "Registry", "default_registry", "load_registry",
    "PairScore", "ScoreBreakdown", "ScoreNode", "Scorer", "WeightConfig",
    "fresco_score", "level_score", "measure_score",
    "SynthResult", "make_embedding_table", "synthesize",
    "ThresholdConfig", "TraitVector", "centroid_ratios", "classify_centrality",
    "classify_framing", "derive_traits", "discretize_group_size",
    "discretize_position",
]
