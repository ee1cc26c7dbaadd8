import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import synth  # noqa: E402

# Directory holding KDDTrain+.txt and KDDTest+.txt; real-data checks skip without it.
NSLKDD_DIR = os.environ.get("NSLKDD_DIR", "")


def nslkdd_paths():
    if not NSLKDD_DIR:
        return None
    base = Path(NSLKDD_DIR)
    train, test = base / "KDDTrain+.txt", base / "KDDTest+.txt"
    if train.is_file() and test.is_file():
        return train, test
    return None


@pytest.fixture(scope="session")
def synthetic_files(tmp_path_factory):
    base = tmp_path_factory.mktemp("nslkdd_synth")
    train = synth.write_split(base / "train.txt", 6000, seed=11)
    test = synth.write_split(base / "test.txt", 2000, seed=12, test=True)
    return train, test


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
