import numpy as np
import pytest
from PIL import Image


def _weights_available() -> bool:
    import torchvision.models as models

    try:
        models.vgg19(weights=models.VGG19_Weights.IMAGENET1K_V1)
    except Exception:
        return False
    return True


@pytest.fixture(scope="session")
def test_image(tmp_path_factory):
    rng = np.random.default_rng(7)
    arr = rng.integers(0, 256, size=(180, 240, 3), dtype=np.uint8)
    path = tmp_path_factory.mktemp("img") / "scene.png"
    Image.fromarray(arr, mode="RGB").save(path)
    return path


@pytest.fixture(scope="session")
def pretrained_ok():
    return _weights_available()
