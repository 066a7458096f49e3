import os
import shutil
import subprocess
from pathlib import Path

import pytest


def _cli() -> str | None:
    return os.environ.get("LIGHTLAYERS_CLI") or shutil.which("lightlayers")


@pytest.fixture(scope="session")
def cli():
    path = _cli()
    if not path:
        pytest.skip("lightlayers CLI not found (set LIGHTLAYERS_CLI)")
    return path


@pytest.fixture(scope="session")
def dataset(cli, tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("data")
    subprocess.run(
        [cli, "--seed", "3", "gen-data", "--count", "2", "--resolution", "32", "--env-width", "128", "--out", str(out)],
        check=True,
        capture_output=True,
    )
    return out


@pytest.fixture(scope="session")
def directional_dataset(cli, tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("data_dir")
    subprocess.run(
        [cli, "--seed", "4", "gen-data", "--count", "1", "--resolution", "32", "--env-width", "128",
         "--directional", "--out", str(out)],
        check=True,
        capture_output=True,
    )
    return out
