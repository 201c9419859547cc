import numpy as np
import pytest

from shockfront import model as mo
from shockfront import solver2d as s2


@pytest.fixture(scope="session")
def calibrated():
    return mo.calibrated_shock_model(1.0)


@pytest.fixture(scope="session")
def diag_model():
    """g = m + psi diag(0,1,0): already normalized, genuinely nonlinear."""
    return mo.quadratic_model(np.diag([0.0, 1.0, 0.0]))


@pytest.fixture(scope="session")
def offdiag_model():
    """Normalized quadratic model with g_01 = psi/2 (exercises the chain rule)."""
    return mo.shock_model(1.0)


@pytest.fixture(scope="session")
def linear_model():
    return mo.quadratic_model(np.zeros((3, 3)))


def small_shock_run(model, nx=768, ny=8, t_max=2.5, **kw):
    grid = s2.Grid2D(nx=nx, ny=ny, x_min=-2.6, x_max=3.6)
    spec_kw = dict(kind="simple_wave", profile="plateau")
    spec_kw.update(kw.pop("spec", {}))
    spec = s2.DataSpec(**spec_kw)
    defaults = dict(dissipation=0.1, n_u_curves=13, n_th_curves=4)
    defaults.update(kw)
    return s2.run(model, grid, spec, t_max=t_max, **defaults)


@pytest.fixture(scope="session")
def shock_run_768(calibrated):
    """Moderate-resolution theta-independent shocked run, shared by tests."""
    return small_shock_run(calibrated, nx=768)


@pytest.fixture(scope="session")
def eps_run_768(calibrated):
    """Moderate-resolution eps-delta run, shared by tests."""
    return small_shock_run(calibrated, nx=768, ny=16,
                           n_th_curves=8, spec=dict(kind="eps_delta", eps0=0.01))
