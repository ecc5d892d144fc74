"""Static checks for common performance anti-patterns in TensorFlow/Keras
client code: repeated graph-node creation in loops, map-before-batch
pipeline ordering, and map/interleave calls that disable parallelism.
"""
from .catalog import ApiCatalog, CatalogError, is_node_creating, load_catalog
from .checkers import (
    ALL_RULES,
    DPM001,
    MOB001,
    RNC001,
    RULES_BY_CODE,
    LoopAnalysis,
    RawFinding,
    RuleId,
    changed_vars,
    check_map_before_batch,
    check_missing_parallelism,
    check_repeated_node_creation,
    loop_contexts,
    run_rules,
)
from .harness import (
    Config,
    ConfigError,
    CorpusReport,
    Expectation,
    discover_files,
    load_config,
    parse_expectations,
    run_check,
    run_corpus,
)
from .reporting import (
    Diagnostic,
    Notice,
    RunSummary,
    apply_suppressions,
    exit_code,
    render_json,
    render_text,
    summarize,
)
from .resolution import (
    AliasTable,
    DatasetState,
    FunctionTable,
    QualifiedName,
    build_alias_table,
    build_function_table,
    qualify_call,
    track_datasets,
)
from .source_model import (
    CallSite,
    LineIndex,
    LoopSite,
    ParseError,
    ParseOutcome,
    SourceUnit,
    Span,
    iter_calls,
    iter_loops,
    parse_source,
)

__version__ = "0.1.0"
