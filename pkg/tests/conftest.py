import os
import subprocess
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    """Directory with the benchmark CSVs; prefers a populated ./data.

    Datasets without an offline source (see scripts/make_datasets.py) are
    only present if the user dropped them in; tests needing them skip.
    """
    local = REPO_ROOT / "data"
    if (local / "iris.csv").exists():
        return str(local)
    target = tmp_path_factory.mktemp("data")
    subprocess.run(
        [sys.executable, str(REPO_ROOT / "scripts" / "make_datasets.py"),
         "--data-dir", str(target)],
        check=True,
    )
    return str(target)


def require_dataset(data_dir, dataset_id):
    from ocrep.datasets import REGISTRY

    path = REGISTRY[dataset_id].path(data_dir)
    if not os.path.exists(path):
        pytest.skip(f"dataset file {path} not available in this environment")
    return path
