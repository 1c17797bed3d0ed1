"""Two-phase training.

Phase 1 (smoothing): learn to clean blended seam patches, lr 1e-4,
20 epochs. Phase 2 (enhancement): load the smoothing weights, freeze
the input stage and the recursive block, and fine-tune only the output
stage on codec-degraded patches, lr 1e-5, 10 epochs. One weight set
serves both tasks afterwards.

Run as a command:
    python -m rclc_enhancer.train --phase smoothing --data pairs.npz --out w.pt
    python -m rclc_enhancer.train --phase enhancement --data pairs2.npz \
        --init-weights w.pt --out w2.pt
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .data import ENHANCEMENT, SMOOTHING, load_dataset
from .errors import EmptySource, PhaseOrderViolation
from .model import (
    EnhancerModel,
    TASK_BU_ENHANCE,
    TASK_RU_SEAM,
    load_weights,
    save_weights,
)

PHASE_DEFAULTS = {SMOOTHING: dict(lr=1e-4, epochs=20),
                  ENHANCEMENT: dict(lr=1e-5, epochs=10)}
PHASE_TASKS = {SMOOTHING: TASK_RU_SEAM, ENHANCEMENT: TASK_BU_ENHANCE}


@dataclass
class TrainConfig:
    phase: str
    lr: float | None = None
    epochs: int | None = None
    batch_size: int = 4
    holdout: float = 0.2
    seed: int = 0
    init_weights: Path | None = None

    def __post_init__(self):
        if self.phase not in PHASE_DEFAULTS:
            raise ValueError(f"unknown phase {self.phase!r}")
        if self.lr is None:
            self.lr = PHASE_DEFAULTS[self.phase]["lr"]
        if self.epochs is None:
            self.epochs = PHASE_DEFAULTS[self.phase]["epochs"]
        if self.phase == ENHANCEMENT and self.init_weights is None:
            raise PhaseOrderViolation(
                "enhancement fine-tuning requires smoothing-phase weights "
                "(--init-weights)")


def _to_tensor(patches: np.ndarray) -> torch.Tensor:
    return torch.from_numpy(patches.astype("float32") / 255.0).unsqueeze(1)


def _mask_tensor(boxes: np.ndarray, shape: tuple[int, int]) -> torch.Tensor:
    masks = torch.zeros((len(boxes), 1) + shape)
    for i, (x0, y0, x1, y1) in enumerate(boxes):
        masks[i, 0, y0:y1, x0:x1] = 1.0
    return masks


def _split(n: int, holdout: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.random.default_rng(seed).permutation(n)
    cut = max(int(n * (1.0 - holdout)), 1)
    return order[:cut], order[cut:]


def _mse(model: EnhancerModel, inputs: torch.Tensor, targets: torch.Tensor,
         task: int, masks: torch.Tensor) -> float:
    with torch.no_grad():
        return float(torch.mean((model(inputs, task, masks) - targets) ** 2))


def train(dataset: dict, cfg: TrainConfig,
          model: EnhancerModel | None = None) -> tuple[EnhancerModel, dict]:
    """Returns the trained model plus held-out metrics.

    The metrics carry the held-out MSE of the trained model and of the
    identity mapping on the same split, so improvement over doing
    nothing is directly visible.
    """
    torch.manual_seed(cfg.seed)
    torch.set_num_threads(1)
    stored_phase = str(dataset["phase"])
    if stored_phase != cfg.phase:
        raise ValueError(f"dataset holds {stored_phase} pairs, config says {cfg.phase}")
    if len(dataset["inputs"]) < 2:
        raise EmptySource("need at least two pairs to hold one out")

    if cfg.phase == ENHANCEMENT:
        model, loaded_phase = load_weights(cfg.init_weights)
        if loaded_phase != SMOOTHING:
            raise PhaseOrderViolation(
                f"init weights are from phase {loaded_phase!r}, need smoothing")
        frozen = set(model.frozen_parameter_names())
        for name, param in model.named_parameters():
            param.requires_grad = name not in frozen
    elif model is None:
        if cfg.init_weights is not None:
            model, _ = load_weights(cfg.init_weights)
        else:
            model = EnhancerModel()

    task = PHASE_TASKS[cfg.phase]
    inputs = _to_tensor(dataset["inputs"])
    targets = _to_tensor(dataset["targets"])
    masks = _mask_tensor(dataset["boxes"], inputs.shape[-2:])
    train_idx, held_idx = _split(len(inputs), cfg.holdout, cfg.seed)
    if len(held_idx) == 0:
        held_idx = train_idx[-1:]
    train_in, train_tg, train_mk = inputs[train_idx], targets[train_idx], masks[train_idx]
    held_in, held_tg, held_mk = inputs[held_idx], targets[held_idx], masks[held_idx]

    identity_mse = float(torch.mean((held_in - held_tg) ** 2))
    before = {name: param.detach().clone()
              for name, param in model.named_parameters()}

    optimizer = torch.optim.Adam(
        [p for p in model.parameters() if p.requires_grad], lr=cfg.lr)
    loss_fn = torch.nn.MSELoss()
    generator = torch.Generator().manual_seed(cfg.seed)
    history = []
    model.train()
    for epoch in range(cfg.epochs):
        order = torch.randperm(len(train_in), generator=generator)
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            optimizer.zero_grad()
            loss = loss_fn(model(train_in[batch], task, train_mk[batch]),
                           train_tg[batch])
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(batch)
        history.append(total / len(train_in))
    model.eval()

    metrics = {
        "history": history,
        "heldout_mse": _mse(model, held_in, held_tg, task, held_mk),
        "identity_mse": identity_mse,
        "heldout_count": int(len(held_idx)),
        "held_indices": held_idx.tolist(),
        "frozen_unchanged": all(
            torch.equal(before[name], param.detach())
            for name, param in model.named_parameters()
            if not param.requires_grad),
    }
    return model, metrics


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="train the enhancer")
    parser.add_argument("--phase", choices=[SMOOTHING, ENHANCEMENT], required=True)
    parser.add_argument("--data", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--lr", type=float)
    parser.add_argument("--init-weights")
    parser.add_argument("--holdout", type=float, default=0.2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    try:
        cfg = TrainConfig(args.phase, lr=args.lr, epochs=args.epochs,
                          holdout=args.holdout, seed=args.seed,
                          init_weights=Path(args.init_weights)
                          if args.init_weights else None)
        model, metrics = train(load_dataset(Path(args.data)), cfg)
    except (EmptySource, PhaseOrderViolation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    save_weights(model, args.out, args.phase)
    print(f"phase={args.phase} epochs={cfg.epochs} lr={cfg.lr} "
          f"heldout_mse={metrics['heldout_mse']:.6f} "
          f"identity_mse={metrics['identity_mse']:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
