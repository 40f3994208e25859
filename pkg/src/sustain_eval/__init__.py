"""Sustainability evaluation metrics for recommender systems."""

__version__ = "0.1.0"

from .errors import SustainEvalError, UndefinedMetric
from .ingest import label_coverage, load_dataset, write_dataset
from .model import Dataset, MetricReport, validate_dataset
