import numpy as np
import pytest

import breather_lab as bl


@pytest.fixture(scope="session")
def warm_driver():
    """Compile the fast integration path once so timed tests exclude it."""
    state = bl.CartesianState(p=[1.0, 0.0], q=[0.0, 0.0])
    params = bl.LatticeParams(n_sites=2, eps=-0.1, gamma=0.005, beta=0.0, omega=1.0)
    bl.simulate_damped(state, params, t_end=1.0, sample_stride=0.5)
    return True


@pytest.fixture(scope="session")
def reference_breather():
    """N=3 breather at the reference spectrum parameters."""
    return bl.solve_breather(0.032, 0.0035, 1.0, 3)


@pytest.fixture(scope="session")
def escape_setup(warm_driver):
    """Long damped three-site run at omega_0=1, gamma=0.005, eps=-0.1."""
    br = bl.solve_breather(-0.1, 0.005, 1.0, 3)
    frame = bl.tangent_frame(br)
    seed = bl.asymptotic_breather(-0.1, 0.005, 1.0, 3)
    traj = bl.simulate_damped(seed.state, br.params.replace(beta=0.0),
                              t_end=3.6e5, sample_stride=50.0)
    trace = bl.modulation_trace(traj, br, frame)
    return {"breather": br, "frame": frame, "traj": traj, "trace": trace}
