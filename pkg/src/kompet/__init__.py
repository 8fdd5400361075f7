"""kompet: distant supervision and measurement toolkit for skill-span labeling."""

from .agreement import AnnotatorView, cohen_kappa, fleiss_kappa
from .corpus import (
    Corpus,
    JobPosting,
    SpanRecord,
    StatsReport,
    corpus_stats,
    parse_corpus,
    split_corpus,
    write_corpus,
)
from .errors import ApiError, InputError, KompetError
from .evaluate import (
    ConfusionMatrix,
    EvalReport,
    baseline_predict,
    confusion_matrix,
    weighted_macro_f1,
)
from .matcher import MatchResult, fetch_skill, levenshtein, levenshtein_matrix, retrieve_candidates
from .significance import (
    AsoMatrix,
    AsoResult,
    ScoreSample,
    aso,
    bonferroni,
    compare_all,
    violation_ratio,
)
from .supervise import (
    LabeledRow,
    LabeledSpan,
    QualityAudit,
    distant_label,
    label_distribution,
    read_labeled,
    silver_quality,
    write_labeled,
)
from .taxonomy import (
    COARSE_TAGS,
    TaxonomyConcept,
    TaxonomyIndex,
    coarse_label,
    fetch_online,
    load_taxonomy,
    write_taxonomy,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatorView",
    "ApiError",
    "AsoMatrix",
    "AsoResult",
    "COARSE_TAGS",
    "ConfusionMatrix",
    "Corpus",
    "EvalReport",
    "InputError",
    "JobPosting",
    "KompetError",
    "LabeledRow",
    "LabeledSpan",
    "MatchResult",
    "QualityAudit",
    "ScoreSample",
    "SpanRecord",
    "StatsReport",
    "TaxonomyConcept",
    "TaxonomyIndex",
    "aso",
    "baseline_predict",
    "bonferroni",
    "coarse_label",
    "cohen_kappa",
    "compare_all",
    "confusion_matrix",
    "corpus_stats",
    "distant_label",
    "fetch_online",
    "fetch_skill",
    "fleiss_kappa",
    "label_distribution",
    "levenshtein",
    "levenshtein_matrix",
    "load_taxonomy",
    "parse_corpus",
    "read_labeled",
    "retrieve_candidates",
    "silver_quality",
    "split_corpus",
    "violation_ratio",
    "weighted_macro_f1",
    "write_corpus",
    "write_labeled",
    "write_taxonomy",
]
