from __future__ import annotations

import numpy as np
import pytest

from mrpke.rng import Expander


@pytest.fixture
def xof() -> Expander:
    return Expander(bytes(range(32)), b"tests")


def np_rng(tag: int = 0) -> np.random.Generator:
    return np.random.default_rng(12345 + tag)
