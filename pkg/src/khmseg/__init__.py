"""Khmer keystroke normalization, cluster splitting and syllable tools."""

from .cluster_grammar import (
    ComponentCluster,
    PatternKind,
    clusters_to_text,
    match_cc,
    match_sc,
    split_clusters,
)
from .errors import (
    DanglingCoengError,
    DatabaseInvariantError,
    DatabaseParseError,
    InputError,
    InvariantError,
    KhmsegError,
    MalformedLabelSequenceError,
)
from .labeler import (
    AmbiguityRecord,
    Confidence,
    ContextWindow,
    FallbackClusterDatabase,
    LabeledCluster,
    PositionLabel,
    Syllable,
    TrainingDatabase,
    label_by_markers,
    label_clusters,
    label_window,
    merge_syllables,
)
from .normalizer import (
    CanonicalSequence,
    Diagnostic,
    normalize,
    normalize_text,
    reorder,
    unify_signs,
    unify_subconsonant,
)
from .script_model import (
    CodepointClass,
    Kind,
    MarkerRole,
    ScriptTables,
    classify,
    default_tables,
    load_tables,
    marker_role,
    serialize_tables,
)
from .sdb_pipeline import (
    BuildResult,
    ClusterInventory,
    EntryType,
    LexiconEntry,
    PipelineReport,
    SyllableDatabase,
    build_cluster_inventory,
    build_sdb,
    ingest_lexicon,
    load_sdb,
    persist_sdb,
    seed_fallback_db,
)
from .segmenter import (
    EvalReport,
    SegmentedText,
    evaluate,
    segment_syllables,
    segment_words,
)

__version__ = "0.1.0"
