"""Thermal-preference classification on embedding features."""

from .dataset import LabeledDataset, assemble_features
from .persist import load_forest, save_forest
from .forest import DegenerateLabels, ForestModel, ForestParams, predict, predict_many, predict_proba, train_forest
from .personality import cluster_personalities, label_histograms
from .recommend import recommend_cells
from .records import CLASSES, FeedbackRecord, FeedbackRow, Preference, read_feedback, read_records, write_feedback, write_records
from .validation import SplitPlan, cross_validate, make_split_plan

__all__ = [
    "LabeledDataset", "assemble_features", "DegenerateLabels", "ForestModel", "ForestParams", "predict",
    "predict_many", "predict_proba", "train_forest", "cluster_personalities", "label_histograms",
    "recommend_cells", "CLASSES", "FeedbackRecord", "Preference", "SplitPlan", "cross_validate",
    "make_split_plan", "load_forest", "save_forest", "FeedbackRow", "read_feedback", "read_records",
    "write_feedback", "write_records",
]
