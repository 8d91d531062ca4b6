"""hlab: instance-hardness orderings for curriculum learning, filtering
and boosting, with a reproducible comparison harness."""

__version__ = "0.1.0"

from .curriculum import (
    CurriculumResult,
    Schedule,
    StageRecord,
    curriculum_train_dt,
    curriculum_train_mlp,
    stage_thresholds,
)
from .cv import CvPlan, make_cv_plan
from .data import Dataset, Feature, Instance, load_table, save_table, synth_gaussians
from .encode import FeatureEncoder
from .ensemble import (
    BoostEnsemble,
    FilterSpec,
    adaboost,
    filter_by_ih,
    filtered_method,
    multiboost,
    predict_ensemble,
)
from .hardness import (
    CorrectnessMatrix,
    HardnessProfile,
    compute_profile,
    correctness_matrix,
    hardness_ordering,
    instance_hardness,
    load_profile,
    save_profile,
)
from .learners import (
    FittedLearner,
    LearnerSpec,
    default_learner_set,
    train_learner,
)
from .metalearn import (
    CodMatrix,
    Dendrogram,
    cluster,
    cod_distance,
    cod_matrix,
    cut,
    representatives,
    to_newick,
)
from .stats import (
    ConvexityResult,
    PairedResults,
    TestResult,
    convexity_measures,
    cv_accuracy,
    wilcoxon_signed_rank,
    win_tie_loss,
)

__all__ = [
    "__version__",
    "BoostEnsemble",
    "CodMatrix",
    "ConvexityResult",
    "CorrectnessMatrix",
    "CurriculumResult",
    "CvPlan",
    "Dataset",
    "Dendrogram",
    "Feature",
    "FeatureEncoder",
    "FilterSpec",
    "FittedLearner",
    "HardnessProfile",
    "Instance",
    "LearnerSpec",
    "PairedResults",
    "Schedule",
    "StageRecord",
    "TestResult",
    "adaboost",
    "cluster",
    "cod_distance",
    "cod_matrix",
    "compute_profile",
    "convexity_measures",
    "correctness_matrix",
    "curriculum_train_dt",
    "curriculum_train_mlp",
    "cut",
    "cv_accuracy",
    "default_learner_set",
    "filter_by_ih",
    "filtered_method",
    "hardness_ordering",
    "instance_hardness",
    "load_profile",
    "load_table",
    "make_cv_plan",
    "multiboost",
    "predict_ensemble",
    "representatives",
    "save_profile",
    "save_table",
    "stage_thresholds",
    "synth_gaussians",
    "to_newick",
    "train_learner",
    "win_tie_loss",
    "wilcoxon_signed_rank",
]
