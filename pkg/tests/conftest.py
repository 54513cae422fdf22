import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from perifront import (BoundaryOp, CompetitionParams, InitialData,
                       bump_profile, constant_field, cosine_profile)


@pytest.fixture
def unit_fields():
    """Constant growth rate 1 for both species, period 1."""
    return constant_field(1.0, 1.0), constant_field(1.0, 1.0)


@pytest.fixture
def weak_params():
    """Constant weak-competition parameters with Dirichlet fronts."""
    bc = BoundaryOp.dirichlet()
    return CompetitionParams(d1=1.0, d2=1.0, k=0.5, h=0.5, mu=1.0, rho=1.0,
                             s0=4.0, bc1=bc, bc2=bc)


@pytest.fixture
def bump_init(weak_params):
    s0 = weak_params.s0
    return InitialData(u0=bump_profile(0.5, s0), v0=bump_profile(0.5, s0),
                       spec={"shape": "bump", "height": 0.5})


def make_params(**kw):
    base = dict(d1=1.0, d2=1.0, k=0.5, h=0.5, mu=1.0, rho=1.0, s0=4.0,
                bc1=BoundaryOp.dirichlet(), bc2=BoundaryOp.dirichlet())
    base.update(kw)
    return CompetitionParams(**base)


def make_init(params, shape="bump", height=0.5, v_level=None):
    maker = bump_profile if shape == "bump" else cosine_profile
    u0 = maker(height, params.s0)
    if v_level is not None:
        v0 = lambda x: np.full_like(np.asarray(x, dtype=float), v_level)
    else:
        v0 = maker(height, params.s0)
    return InitialData(u0=u0, v0=v0, spec={"shape": shape, "height": height})
