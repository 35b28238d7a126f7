"""dimtext: multi-dimensional contextual modeling of user-generated text.

Per-dimension skip-gram embeddings represent users along contextual
dimensions; truncated SVD fuses them; density-based clustering screens a
labeled class for likely outliers with statistical validation; topical
imputation repairs sparse representations; and a classification ablation
measures every dimension combination against a frequency baseline.
"""

from .corpus import (
    Corpus,
    Document,
    UserDoc,
    ingest,
    load_corpus,
    merge,
    normalize,
    save_corpus,
    subset,
)
from .embedding import (
    DimensionModel,
    SkipgramParams,
    build_vocab,
    load_model,
    save_model,
    sgns_loss_grad,
    train_skipgram,
)
from .errors import DataError, DimtextError, InvariantError, UsageError
from .imputation import ImputationRecord, impute, jaccard
from .ngram import (
    NgramTable,
    TokenSetG,
    build_token_set,
    extract_ngrams,
    inject_phrases,
    npmi,
    phrase_inventory,
    top_k_by_class,
    user_ngram_table,
)
from .outliers import (
    NOISE,
    ClusterAssignment,
    KappaResult,
    RemovalReport,
    UTestResult,
    cohen_kappa,
    hdbscan,
    hdbscan_labels,
    mann_whitney_u,
    remove_outliers,
    scalarize_for_test,
    split_majority_minority,
)
from .classify import (
    AblationConfig,
    EvalReport,
    ForestModel,
    NaiveBayesModel,
    RFParams,
    baseline_model,
    holdout_split,
    metrics,
    predict,
    predict_proba,
    roc_auc,
    run_ablation,
    stratified_kfold,
    train_nb,
    train_rf,
)
from .representation import (
    FusedUserVector,
    SvdBasis,
    UserDimVector,
    build_user_vectors,
    detect_sparse,
    fit_basis,
    fit_svd,
    fuse,
    user_dim_vector,
)
from .similarity import SimilarityMatrix, cosine, similarity_matrix
from .synth import SynthConfig, generate
from .topics import (
    PerplexityCurve,
    PseudoUserClusters,
    TopicModel,
    fit_class_models,
    fit_hdp,
    fit_lda,
    perplexity,
    select_k,
    user_topics,
)

__version__ = "0.1.0"
