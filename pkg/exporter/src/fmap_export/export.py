"""Run a pretrained backbone on an image and capture one tap activation.

Images are resized to the model's standard input size and normalized with
the ImageNet statistics the pretrained weights expect.  Inference runs on
CPU in eval mode under no_grad, so exports are deterministic and
re-exporting overwrites with identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .fmap import write_fmap
from .taps import MODEL_INPUT_SIZE, TapPoint, resolve_tap

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)
UNTRAINED_SEED = 0


@dataclass(frozen=True)
class ExportRequest:
    image_path: str | Path
    model_id: str = "vgg19"
    layer_id: str | None = None
    output_path: str | Path = "features.fmap"
    pretrained: bool = True


class WeightsUnavailableError(RuntimeError):
    """Pretrained weights could not be loaded (no cache, no network)."""


def _build_model(model_id: str, pretrained: bool) -> torch.nn.Module:
    from torchvision import models

    factories = {
        "vgg19": (models.vgg19, models.VGG19_Weights.IMAGENET1K_V1),
        "resnet34": (models.resnet34, models.ResNet34_Weights.IMAGENET1K_V1),
        "inception_v3": (models.inception_v3, models.Inception_V3_Weights.IMAGENET1K_V1),
    }
    if model_id not in factories:
        raise ValueError(f"unknown model {model_id!r}")
    factory, weights = factories[model_id]
    if pretrained:
        try:
            model = factory(weights=weights)
        except Exception as exc:
            raise WeightsUnavailableError(
                f"could not load pretrained weights for {model_id}: {exc}"
            ) from exc
    else:
        # reproducible stand-in weights for environments without the
        # pretrained checkpoints (shape/format testing only)
        torch.manual_seed(UNTRAINED_SEED)
        kwargs = {"init_weights": True} if model_id == "inception_v3" else {}
        model = factory(weights=None, **kwargs)
    model.eval()
    return model


def preprocess(image_path: str | Path, model_id: str) -> torch.Tensor:
    size = MODEL_INPUT_SIZE[model_id]
    with Image.open(image_path) as img:
        rgb = img.convert("RGB").resize((size, size), Image.BILINEAR)
    arr = np.asarray(rgb, dtype=np.float32) / 255.0
    arr = (arr - np.asarray(IMAGENET_MEAN, dtype=np.float32)) / np.asarray(
        IMAGENET_STD, dtype=np.float32
    )
    return torch.from_numpy(arr.transpose(2, 0, 1)).unsqueeze(0)


def _capture(model: torch.nn.Module, tap: TapPoint, batch: torch.Tensor) -> torch.Tensor:
    captured: list[torch.Tensor] = []
    module = model.get_submodule(tap.module_path)
    handle = module.register_forward_hook(
        lambda _mod, _inp, out: captured.append(out.detach().clone())
    )
    try:
        with torch.no_grad():
            model(batch)
    finally:
        handle.remove()
    if not captured:
        raise RuntimeError(f"tap {tap.layer_id} was never reached during the forward pass")
    return captured[0]


def extract_activation(
    image_path: str | Path,
    model_id: str = "vgg19",
    layer_id: str | None = None,
    pretrained: bool = True,
    model: torch.nn.Module | None = None,
) -> np.ndarray:
    """(H, W, C) float32 activation of the tap for one image."""
    tap = resolve_tap(model_id, layer_id)
    if model is None:
        model = _build_model(model_id, pretrained)
    batch = preprocess(image_path, model_id)
    out = _capture(model, tap, batch)
    if out.ndim != 4 or out.shape[0] != 1:
        raise RuntimeError(f"unexpected activation shape {tuple(out.shape)}")
    values = out[0].permute(1, 2, 0).numpy().astype(np.float32)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"non-finite activations at tap {tap.layer_id}")
    return values


def export_features(request: ExportRequest, model: torch.nn.Module | None = None) -> Path:
    """Write the tap activation as an FMAP file; returns the output path."""
    values = extract_activation(
        request.image_path,
        model_id=request.model_id,
        layer_id=request.layer_id,
        pretrained=request.pretrained,
        model=model,
    )
    out = Path(request.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_fmap(values, out)
    return out


def load_model(model_id: str, pretrained: bool = True) -> torch.nn.Module:
    """Build the backbone once for batch exports."""
    return _build_model(model_id, pretrained)
