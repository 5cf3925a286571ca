import numpy as np
import pytest
from dataclasses import replace

import cyclosense as cs


@pytest.fixture(scope="session")
def mini_plan() -> cs.ExperimentPlan:
    """Small, fast plan for structural tests: K=1024, 150/120 windows."""
    return replace(
        cs.desk_plan(7),
        signal_spec=cs.SignalSpec(1.0e6, 1.0e4, 3.0e6, 2048, "am", 0.5),
        scd_cfg=cs.ScdConfig(
            window_length_k=1024,
            smoothing_length=301,
            alpha_grid=(cs.snap_alpha_to_even_bin(2.0e6, 3.0e6, 1024),),
        ),
        noise_windows_l=150,
        signal_windows_m=120,
        snr_db_list=(-10.0, 0.0),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
