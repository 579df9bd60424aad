"""Two-headed convolutional value network over the drivers' observations."""

import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
import torch
import torch.nn as nn
from pydantic import BaseModel, Field

from ..errors import CheckpointError, ShapeError
from .features import FEATURE_COUNT

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
NUM_ACTIONS = 2


class ManagerArchitecture(BaseModel):
    """Layer sizes of the manager network."""

    input_size: int = Field(48, gt=0, description="Side of the square observation fed to each head, pixels")
    channels: List[int] = Field(default_factory=lambda: [16, 32, 32], min_length=1)
    kernel_size: int = Field(3, gt=0)
    stride: int = Field(2, gt=0)
    hidden: List[int] = Field(default_factory=lambda: [256, 128], min_length=1)
    feature_count: int = Field(FEATURE_COUNT, ge=0)


class ConvHead(nn.Module):
    """Conv -> BatchNorm -> ReLU blocks, flattened."""

    def __init__(self, channels: List[int], kernel_size: int, stride: int):
        super().__init__()
        layers: List[nn.Module] = []
        in_channels = 3
        for out_channels in channels:
            layers += [
                nn.Conv2d(in_channels, out_channels, kernel_size, stride=stride, padding=kernel_size // 2),
                nn.BatchNorm2d(out_channels),
                nn.ReLU(),
            ]
            in_channels = out_channels
        layers.append(nn.Flatten())
        self.body = nn.Sequential(*layers)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.body(x)


class ManagerNetwork(nn.Module):
    """Q-values over {delegate-human, delegate-AI}."""

    def __init__(self, architecture: ManagerArchitecture = None):
        super().__init__()
        self.architecture = architecture or ManagerArchitecture()
        arch = self.architecture
        self.human_head = ConvHead(arch.channels, arch.kernel_size, arch.stride)
        self.ai_head = ConvHead(arch.channels, arch.kernel_size, arch.stride)
        with torch.no_grad():
            blank = torch.zeros(2, 3, arch.input_size, arch.input_size)
            self.human_head.eval()
            head_dim = self.human_head(blank).shape[1]
            self.human_head.train()
        layers: List[nn.Module] = []
        width = 2 * head_dim + arch.feature_count
        for hidden in arch.hidden:
            layers += [nn.Linear(width, hidden), nn.ReLU()]
            width = hidden
        self.hidden = nn.Sequential(*layers)
        self.output = nn.Linear(width, NUM_ACTIONS)

    def _check(self, human: torch.Tensor, ai: torch.Tensor, features: torch.Tensor) -> None:
        size = self.architecture.input_size
        for name, image in (("human", human), ("ai", ai)):
            if image.dim() != 4 or tuple(image.shape[1:]) != (3, size, size):
                raise ShapeError(f"{name} observation has shape {tuple(image.shape)}, expected (N, 3, {size}, {size})")
        if features.dim() != 2 or features.shape[1] != self.architecture.feature_count:
            raise ShapeError(
                f"features have shape {tuple(features.shape)}, expected (N, {self.architecture.feature_count})"
            )
        if not human.shape[0] == ai.shape[0] == features.shape[0]:
            raise ShapeError("Batch sizes differ between inputs")

    def forward(self, human: torch.Tensor, ai: torch.Tensor, features: torch.Tensor) -> torch.Tensor:
        self._check(human, ai, features)
        joined = torch.cat([self.human_head(human), self.ai_head(ai), features], dim=1)
        return self.output(self.hidden(joined))


def to_tensor_images(images: np.ndarray, device: Union[str, torch.device] = "cpu") -> torch.Tensor:
    """uint8 (N, H, W, 3) or (H, W, 3) -> float (N, 3, H, W) in [0, 1]."""
    array = np.asarray(images)
    if array.ndim == 3:
        array = array[None]
    tensor = torch.as_tensor(array, dtype=torch.float32, device=device)
    return tensor.permute(0, 3, 1, 2).contiguous() / 255.0


def to_tensor_features(features: np.ndarray, device: Union[str, torch.device] = "cpu") -> torch.Tensor:
    array = np.asarray(features, dtype=np.float32)
    if array.ndim == 1:
        array = array[None]
    return torch.as_tensor(array, device=device)


def q_values(net: ManagerNetwork, human: np.ndarray, ai: np.ndarray, features: np.ndarray) -> np.ndarray:
    """Inference-mode Q-values for a single observation."""
    was_training = net.training
    net.eval()
    device = next(net.parameters()).device
    with torch.no_grad():
        q = net(to_tensor_images(human, device), to_tensor_images(ai, device), to_tensor_features(features, device))
    if was_training:
        net.train()
    return q[0].cpu().numpy()


def layer_shapes(net: nn.Module) -> Dict[str, Tuple[int, ...]]:
    return {name: tuple(tensor.shape) for name, tensor in net.state_dict().items()}


def save_checkpoint(net: ManagerNetwork, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "version": CHECKPOINT_VERSION,
            "architecture": net.architecture.model_dump(),
            "layer_shapes": layer_shapes(net),
            "state_dict": net.state_dict(),
        },
        path,
    )
    logger.info("Saved checkpoint to %s", path)
    return path


def load_checkpoint(path: Union[str, Path], architecture: ManagerArchitecture = None) -> ManagerNetwork:
    """Rebuild a network from a checkpoint, verifying version and layer shapes.

    When `architecture` is given it must match the stored one.
    """
    path = Path(path)
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise CheckpointError(f"Unreadable checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"Unsupported checkpoint version in {path}: {payload.get('version') if isinstance(payload, dict) else None}")
    stored = ManagerArchitecture(**payload["architecture"])
    if architecture is not None and architecture != stored:
        raise CheckpointError(f"Checkpoint architecture {stored} does not match configured {architecture}")
    net = ManagerNetwork(stored)
    expected = layer_shapes(net)
    recorded = {name: tuple(shape) for name, shape in payload["layer_shapes"].items()}
    if recorded != expected:
        raise CheckpointError(f"Layer shapes in {path} do not match the architecture")
    net.load_state_dict(payload["state_dict"])
    net.eval()
    logger.info("Loaded checkpoint from %s", path)
    return net
