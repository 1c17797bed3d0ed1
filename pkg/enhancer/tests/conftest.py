"""Session-scoped fixtures: the training corpus and the two-phase,
trained weights are expensive, so they are built once per run. All
source material flows through the rclc CLI (Y4M + sidecar files) — the
package under test never imports the codec library."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

from rclc_enhancer.data import build_dataset, load_dataset, seam_band_mask
from rclc_enhancer.model import TASK_RU_SEAM, enhance_plane, save_weights
from rclc_enhancer.train import TrainConfig, train

SERVE_CMD = f"{sys.executable} -m rclc_enhancer.serve"


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    return tmp_path_factory.mktemp("corpus")


@pytest.fixture(scope="session")
def smoothing_data(corpus_dir):
    path = corpus_dir / "smoothing.npz"
    build_dataset(path, "smoothing", qps=(32, 37, 42, 47), preset="portrait",
                  crop=48)
    return load_dataset(path)


@pytest.fixture(scope="session")
def enhancement_data(corpus_dir):
    path = corpus_dir / "enhancement.npz"
    build_dataset(path, "enhancement", qps=(37, 42, 47), preset="portrait",
                  crop=48, stride=40)
    return load_dataset(path)


@pytest.fixture(scope="session")
def trained(corpus_dir, smoothing_data):
    model, metrics = train(smoothing_data, TrainConfig("smoothing", seed=0))
    path = corpus_dir / "smoothing.pt"
    save_weights(model, path, "smoothing")
    return {"model": model, "metrics": metrics, "weights": path}


def heldout_seam_band_reduction(model, metrics, data, qp: int = 42,
                                band: int = 2) -> float:
    """Percent seam-band MSE reduction vs identity on held-out pairs."""
    held = np.array(metrics["held_indices"])
    selected = held[data["qps"][held] == qp]
    assert len(selected) > 0
    identity, enhanced = [], []
    for i in selected:
        x, target, box = data["inputs"][i], data["targets"][i], data["boxes"][i]
        mask = seam_band_mask(tuple(box), x.shape, band=band)
        y = enhance_plane(model, x, TASK_RU_SEAM, tuple(box))
        identity.append(np.mean((x.astype(float)[mask] - target.astype(float)[mask]) ** 2))
        enhanced.append(np.mean((y.astype(float)[mask] - target.astype(float)[mask]) ** 2))
    return float((1.0 - np.mean(enhanced) / np.mean(identity)) * 100.0)
