"""Learned enhancer for rclc streams: a small recursive residual network
trained for seam smoothing, fine-tuned for BU-ROI enhancement, served
over the rclc enhancer subprocess protocol."""

from .data import ENHANCEMENT, SMOOTHING, build_dataset, build_pairs, load_dataset
from .errors import EmptySource, EnhancerTrainingError, PhaseOrderViolation
from .model import EnhancerModel, enhance_plane, load_weights, save_weights
from .train import TrainConfig, train

__version__ = "0.1.0"
