"""Spatial relations between oriented boxes, plus a query pipeline.

The package models scenes as yaw-oriented boxes (:class:`SpatialObject`)
collected in a :class:`FactBase`, deduces symbolic relations between
them (:func:`deduce`), and evaluates pipe-delimited inference pipelines
over the result (:func:`run_pipeline`).
"""

from .model import (
    ABSENT,
    AdjustmentSettings,
    DerivedAttributes,
    FactBase,
    SpatialObject,
    SpatialRelation,
    derive_attributes,
    validate_object,
)
from .relations import (
    CATEGORIES,
    INVERSES,
    PREDICATE_CATEGORY,
    SECTOR_CODES,
    canonical_predicate,
    deduce,
    ensure_categories,
    predicate_category,
    relations_between,
)
from .taxonomy import Taxonomy, TaxonomyError, load_taxonomy
from .dsl import Pipeline, PipelineParseError, parse_pipeline, pipeline_text
from .engine import (
    LogEntry,
    PipelineResult,
    PipelineRuntimeError,
    evaluate_pipeline,
    run_pipeline,
)
from .serialize import (
    FactDocumentError,
    dump_facts,
    dumps_facts,
    load_facts,
    loads_facts,
)
from .export import export_mermaid, export_scene

__version__ = "0.1.0"

__all__ = [
    "ABSENT",
    "AdjustmentSettings",
    "CATEGORIES",
    "DerivedAttributes",
    "FactBase",
    "FactDocumentError",
    "INVERSES",
    "LogEntry",
    "PREDICATE_CATEGORY",
    "Pipeline",
    "PipelineParseError",
    "PipelineResult",
    "PipelineRuntimeError",
    "SECTOR_CODES",
    "SpatialObject",
    "SpatialRelation",
    "Taxonomy",
    "TaxonomyError",
    "canonical_predicate",
    "deduce",
    "derive_attributes",
    "dump_facts",
    "dumps_facts",
    "ensure_categories",
    "evaluate_pipeline",
    "export_mermaid",
    "export_scene",
    "load_facts",
    "load_taxonomy",
    "loads_facts",
    "parse_pipeline",
    "pipeline_text",
    "predicate_category",
    "relations_between",
    "run_pipeline",
    "validate_object",
    "__version__",
]
