import numpy as np
import pytest
from hypothesis import strategies as st

from qndsim.device import CouplingConstants
from qndsim.fock import PhotonPureState


def random_state(rng, n_max):
    amps = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
    return PhotonPureState.from_amplitudes(amps)


def random_coupling(rng, g_max=0.5):
    zn = rng.uniform(-g_max / 2, g_max / 2)
    zw = rng.uniform(-g_max / 2, g_max / 2)
    return CouplingConstants(zn, zw, rng.uniform(-np.pi, np.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


finite = dict(allow_nan=False, allow_infinity=False)

couplings = st.builds(
    CouplingConstants,
    st.floats(-0.3, 0.3, **finite),
    st.floats(-0.3, 0.3, **finite),
    st.floats(-np.pi, np.pi, **finite),
)


@st.composite
def pure_states(draw, min_dim=1, max_dim=12):
    dim = draw(st.integers(min_dim, max_dim))
    re = draw(st.lists(st.floats(-1, 1, **finite), min_size=dim, max_size=dim))
    im = draw(st.lists(st.floats(-1, 1, **finite), min_size=dim, max_size=dim))
    amps = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(amps) < 1e-3:
        amps[0] += 1.0
    return PhotonPureState.from_amplitudes(amps)
