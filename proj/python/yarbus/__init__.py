"""Joint-goal belief tracking over slot-filling dialog acts."""

from yarbus._core import (
    Belief,
    DialogAct,
    IoError,
    Ontology,
    ParseError,
    RuleMask,
    SluHypotheses,
    Utterance,
    ValidationError,
    extract_infos,
    initial_belief,
    joint_goal_count,
    load_ontology,
    normalize_hyps,
    prune,
    resolve_repeat,
    track_session_files,
    unthis_hyps,
    update,
)

__all__ = [
    "Belief",
    "DialogAct",
    "IoError",
    "Ontology",
    "ParseError",
    "RuleMask",
    "SluHypotheses",
    "Utterance",
    "ValidationError",
    "extract_infos",
    "initial_belief",
    "joint_goal_count",
    "load_ontology",
    "normalize_hyps",
    "prune",
    "resolve_repeat",
    "track_session_files",
    "unthis_hyps",
    "update",
]
