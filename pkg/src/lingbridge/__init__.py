"""lingbridge: dataless cross-lingual document classification.

Labels (in English) and documents (in any supported language) embed into a
shared encyclopedia-concept space; documents in languages with too little
concept coverage are first word-translated into a better-covered bridge
language. The ranking module scores candidate bridges by typological
similarity, corpus size, link counts, their harmonic combination, or a
learned pairwise ranker.
"""

from .bridge import (
    BridgedDocument,
    CoverageReport,
    coverage_report,
    translate_document,
    write_coverage_report,
)
from .classifier import (
    Prediction,
    classify_bridged,
    classify_clesa,
    classify_monolingual,
    load_predictions,
    majority_vote,
    write_predictions,
)
from .clesa import ClesaSpace, build_clesa, embed_shared, load_clesa, save_clesa
from .corpus import (
    BilingualDictionary,
    ConceptDoc,
    Document,
    LabelDescription,
    TitleLinkTable,
    TypologyTable,
    lang_code,
    load_concept_corpus,
    load_dictionary,
    load_documents,
    load_labels,
    load_title_links,
    load_typology,
    save_concept_corpus,
    save_dictionary,
    save_documents,
    save_title_links,
    tokenize,
)
from .errors import ParseError, ValidationError
from .esa import (
    ConceptVector,
    EsaIndex,
    build_index,
    cosine,
    embed_text,
    load_index,
    save_index,
)
from .ranking import (
    DEFAULT_C_GRID,
    BridgeScore,
    CrossValReport,
    PairFeatureVector,
    RankSvmModel,
    RankWeight,
    cross_validate,
    harmonic_combine,
    hinge_loss,
    lang_links_score,
    linguistic_similarity,
    load_accuracy_matrix,
    load_model,
    pair_features,
    rank_bridges,
    ranksvm_objective,
    ranksvm_score,
    save_model,
    to_rank_weights,
    top_weights,
    train_ranksvm,
    wiki_size_score,
    write_ranking,
)
from .stats import (
    ClusterAssignment,
    MetricResult,
    accuracy,
    dependent_corr_test,
    kmeans_tfidf,
    paired_ttest,
    pearson,
    purity,
    write_metric,
)

__version__ = "0.1.0"
