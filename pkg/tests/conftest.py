import os

import numpy as np
import pytest

import gafm
from gafm.baselines import MethodKind
from gafm.experiments import run_single

# Desk-scale settings: higher learning rate and fewer epochs than the
# hour-scale defaults, sized so the full 10-seed grid runs in well under a
# minute while reproducing the qualitative method ordering.
FAST_CFG = gafm.GafmConfig(delta=0.05, epochs=100, batch=256,
                           lr_d=1e-3, lr_g=1e-3, lr_l=1e-3)

SEEDS = list(range(10))


def spambase_path() -> str | None:
    """Real Spambase file, if the user supplied one (no download in-scope)."""
    for cand in (os.environ.get("GAFM_SPAMBASE"),
                 os.path.join(os.path.dirname(__file__), "..", "data",
                              "spambase.data")):
        if cand and os.path.exists(cand):
            return cand
    return None


@pytest.fixture(scope="session")
def synth():
    return gafm.synthetic_gaussian(n=1500, d=12, class_separation=4.0,
                                   positive_fraction=0.4, seed=0)


@pytest.fixture(scope="session")
def grid_rows(synth):
    """10-seed rows for every method on the synthetic dataset (cached)."""
    out = {}
    for kind in MethodKind:
        out[kind] = [run_single(synth, kind, s, FAST_CFG)[0] for s in SEEDS]
    return out
