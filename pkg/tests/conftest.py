import numpy as np
import pytest

from revid.colourclass import default_catalog
from revid.templates import Modality, Template, unit_f32


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def catalog():
    return default_catalog(dim=16, seed=0)


def random_unit_template(rng, modality=Modality.SHAPE, dim=32) -> Template:
    """Unit template with float32-clean values (wire-exact)."""
    return unit_f32(modality, rng.standard_normal(dim))
