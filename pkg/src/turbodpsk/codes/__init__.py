"""Outer channel codes and the frame interleaver."""

import os
from pathlib import Path

ASSET_ENV = "TURBODPSK_ASSETS"


def asset_dir():
    """Directory holding the parity-check matrix and interleaver files."""
    override = os.environ.get(ASSET_ENV)
    if override:
        return Path(override)
    return Path(__file__).with_name("assets")
