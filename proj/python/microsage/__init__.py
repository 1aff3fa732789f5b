"""Pairwise microbial interaction sign prediction.

Co-culture experiments become a species/condition interaction network; its
line graph turns each experiment into a node, and a two-layer
mean-aggregation GraphSAGE classifies interaction signs (one-way task) or
types (two-way task: mutualism / competition / parasitism). kNN and
gradient-boosted-tree baselines train on the same features and split.
"""

from microsage._core import (  # noqa: F401
    ClassMetrics,
    CocultureRecord,
    ConfusionMatrix,
    Dataset,
    EdgeGraph,
    EpochStats,
    FeatureContext,
    GbdtConfig,
    GbdtModel,
    GraphMode,
    GraphSageModel,
    InteractionGraph,
    KnnModel,
    Matrix,
    MetricsReport,
    PcaModel,
    PipelineError,
    RecordOrientation,
    SignLabel,
    SplitMasks,
    Task,
    TrainConfig,
    TrainResult,
    TwoWayLabel,
    World,
    WorldConfig,
    assemble_features,
    build_feature_context,
    build_interaction_graph,
    class_index,
    confusion_matrix,
    derive_two_way,
    f1_score,
    feature_names,
    gbdt_fit,
    gbdt_predict,
    generate_world,
    ingest_csv,
    knn_fit,
    knn_predict,
    label_one_way,
    masked_accuracy,
    metabolic_dissimilarity,
    metrics_from_confusion,
    mode_for_task,
    pca_fit,
    pca_project,
    predict_labels,
    run_pipeline,
    simulate_dataset,
    split_train_test,
    to_edge_graph,
    train,
    two_way_distribution,
)

__version__ = "0.1.0"
