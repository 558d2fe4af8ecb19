from pathlib import Path

import numpy as np
import pytest

from models.config import load_config
from models.spin import SpinModel
from utils.io_utils import write_trace_csv
from utils.spectrum_utils import mors

CONFIGS_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS_DIR


@pytest.fixture
def fig1_config():
    return load_config(str(CONFIGS_DIR / "fig1.cfg"))


@pytest.fixture
def fig1_model(fig1_config) -> SpinModel:
    return fig1_config.model.to_spin_model(fig1_config.species.to_species())


@pytest.fixture
def fig1_grid(fig1_model) -> np.ndarray:
    return np.linspace(fig1_model.omega_center - 150.0, fig1_model.omega_center + 150.0, 2001)


@pytest.fixture
def fig1_trace(fig1_model, fig1_grid):
    trace, _ = mors(fig1_model, fig1_grid)
    return trace


@pytest.fixture
def fig1_csv(tmp_path, fig1_trace) -> Path:
    path = tmp_path / "fig1_trace.csv"
    write_trace_csv(str(path), fig1_trace)
    return path
