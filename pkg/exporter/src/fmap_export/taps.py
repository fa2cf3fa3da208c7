"""Tap-point catalogs for the supported pretrained backbones.

A tap names an intermediate activation worth exporting:

* ``vgg19`` — the five post-activation conv outputs that feed a pooling
  stage; ``conv16`` (the deepest, 14x14x512 on 224x224 input) is the
  default.
* ``resnet34`` — the five stage outputs (stem + the four residual layers).
* ``inception_v3`` — the seven points where the spatial resolution changes
  on the way to the average pool (299x299 input).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TapPoint:
    layer_id: str
    module_path: str        # dotted attribute path inside the torchvision model
    description: str
    default: bool = False


MODEL_INPUT_SIZE = {"vgg19": 224, "resnet34": 224, "inception_v3": 299}

_VGG19 = [
    # indices into vgg19().features; +1 taps the ReLU after the conv
    TapPoint("conv2", "features.3", "block 1 output before pooling (224x224x64)"),
    TapPoint("conv4", "features.8", "block 2 output before pooling (112x112x128)"),
    TapPoint("conv8", "features.17", "block 3 output before pooling (56x56x256)"),
    TapPoint("conv12", "features.26", "block 4 output before pooling (28x28x512)"),
    TapPoint("conv16", "features.35", "block 5 output before pooling (14x14x512)", default=True),
]

_RESNET34 = [
    TapPoint("stage1", "relu", "stem conv output (112x112x64)"),
    TapPoint("stage2", "layer1", "first residual stage (56x56x64)"),
    TapPoint("stage3", "layer2", "second residual stage (28x28x128)"),
    TapPoint("stage4", "layer3", "third residual stage (14x14x256)", default=True),
    TapPoint("stage5", "layer4", "fourth residual stage (7x7x512)"),
]

_INCEPTION_V3 = [
    TapPoint("reduce1", "Conv2d_1a_3x3", "stride-2 stem conv (149x149x32)"),
    TapPoint("reduce2", "Conv2d_2a_3x3", "valid-padding stem conv (147x147x32)"),
    TapPoint("reduce3", "maxpool1", "first max pool (73x73x64)"),
    TapPoint("reduce4", "Conv2d_4a_3x3", "valid-padding conv (71x71x192)"),
    TapPoint("reduce5", "maxpool2", "second max pool (35x35x192)"),
    TapPoint("reduce6", "Mixed_6a", "first grid reduction block (17x17x768)", default=True),
    TapPoint("reduce7", "Mixed_7a", "second grid reduction block (8x8x1280)"),
]

_CATALOG = {"vgg19": _VGG19, "resnet34": _RESNET34, "inception_v3": _INCEPTION_V3}


def list_layers(model_id: str) -> list[TapPoint]:
    if model_id not in _CATALOG:
        raise ValueError(
            f"unknown model {model_id!r}; supported: {', '.join(sorted(_CATALOG))}"
        )
    return list(_CATALOG[model_id])


def resolve_tap(model_id: str, layer_id: str | None) -> TapPoint:
    taps = list_layers(model_id)
    if layer_id is None:
        return next(t for t in taps if t.default)
    for tap in taps:
        if tap.layer_id == layer_id:
            return tap
    known = ", ".join(t.layer_id for t in taps)
    raise ValueError(f"unknown layer {layer_id!r} for {model_id}; known: {known}")
