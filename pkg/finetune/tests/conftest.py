"""Shared fixtures: a small exported image tree built through the `jtm` CLI.

The harness consumes the encoder toolkit only through its external
interfaces, and so do these tests: the tree comes from the `jtm dataset`
command and fusion goes through `jtm fuse`, both run as subprocesses.
"""

import shutil
import subprocess
import sys

import pytest

PLANES = ("front", "top", "side")
KEEP_CLASSES = ("circle-cw", "sweep-const")


def run_jtm(*args):
    """Run the encoder CLI; fails the test on a non-zero exit."""
    proc = subprocess.run(
        [sys.executable, "-m", "jtm.cli", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.fixture(scope="session")
def image_tree(tmp_path_factory):
    """Two-class tree (12 train + 12 test images over three planes): the
    four-class direction/magnitude corpus pruned to one class per pair."""
    tree = tmp_path_factory.mktemp("tree")
    run_jtm(
        "dataset",
        "--corpus", "dirmag4",
        "--per-class", "4",
        "--size", "64",
        "--out-dir", str(tree),
    )
    for split in ("train", "test"):
        for plane in PLANES:
            for cdir in (tree / split / plane).iterdir():
                if cdir.is_dir() and cdir.name not in KEEP_CLASSES:
                    shutil.rmtree(cdir)
    return tree
