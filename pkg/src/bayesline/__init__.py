"""Bayesian linear-regression workbench over word-count data.

Pipeline: corpus word statistics -> closed-form least squares -> MCMC
posterior sampling (random-walk Metropolis or Hamiltonian Monte Carlo) ->
diagnostics, line ensembles, evidence estimates, and CSV/JSON/SVG export.
"""

from .corpus import (
    Corpus,
    DataPoint,
    Dataset,
    StopwordList,
    WordStats,
    format_dataset_tsv,
    ingest_articles,
    load_dataset_tsv,
    top_k,
    word_stats,
)
from .density import ParamVector
from .inference import (
    ConjugateNormalState,
    EvidenceEstimate,
    LineEnsemble,
    Summary,
    bayes_factor,
    conjugate_update,
    draw_line_ensemble,
    ess,
    estimate_evidence,
    posterior_predictive,
    sequential_update,
    split_rhat,
    summarize,
)
from .modelspec import (
    DistributionSpec,
    ModelSpec,
    default_model,
    format_model_spec,
    parse_model_spec,
)
from .ols import OlsFit, ols_fit
from .sampler import Chains, SamplerConfig, sample_hmc, sample_rwm

__version__ = "0.1.0"

__all__ = [
    "Chains",
    "ConjugateNormalState",
    "Corpus",
    "DataPoint",
    "Dataset",
    "DistributionSpec",
    "EvidenceEstimate",
    "LineEnsemble",
    "ModelSpec",
    "OlsFit",
    "ParamVector",
    "SamplerConfig",
    "StopwordList",
    "Summary",
    "WordStats",
    "bayes_factor",
    "conjugate_update",
    "default_model",
    "draw_line_ensemble",
    "ess",
    "estimate_evidence",
    "format_dataset_tsv",
    "format_model_spec",
    "ingest_articles",
    "load_dataset_tsv",
    "ols_fit",
    "parse_model_spec",
    "posterior_predictive",
    "sample_hmc",
    "sample_rwm",
    "sequential_update",
    "split_rhat",
    "summarize",
    "top_k",
    "word_stats",
]
