import numpy as np
import pytest

from drspace import CliffordModuleSpec, DamekRicciSpace, build_algebra, standard_instance
from drspace.algebra import _quaternionic_generators

PRESETS = ["heisenberg", "quaternionic", "htype_k2", "cayley"]

_NAME_MAP = {
    "heisenberg": ("heisenberg_q", 1),
    "quaternionic": ("quaternionic_q", 1),
    "htype_k2": ("htype_k2", 1),
    "cayley": ("cayley", 1),
}


def make_preset_space(name):
    catalog_name, q = _NAME_MAP[name]
    return DamekRicciSpace(build_algebra(standard_instance(catalog_name, q)))


def anisotropic_spec():
    # two quaternionic blocks with the third generator flipped on the second;
    # K^2 acquires direction-dependent eigenvalues strictly inside (-1, 0)
    gens = _quaternionic_generators(2)
    gens[2][4:, 4:] *= -1.0
    return CliffordModuleSpec(m=8, k=3, generators=gens)


@pytest.fixture(scope="session")
def spaces():
    return {name: make_preset_space(name) for name in PRESETS}


@pytest.fixture(scope="session", params=PRESETS)
def any_space(request, spaces):
    return spaces[request.param]


@pytest.fixture(scope="session")
def quaternionic(spaces):
    return spaces["quaternionic"]


@pytest.fixture(scope="session")
def htype_k2(spaces):
    return spaces["htype_k2"]


@pytest.fixture(scope="session")
def heisenberg(spaces):
    return spaces["heisenberg"]


@pytest.fixture(scope="session")
def cayley(spaces):
    return spaces["cayley"]


@pytest.fixture(scope="session")
def anisotropic():
    return DamekRicciSpace(build_algebra(anisotropic_spec()))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
