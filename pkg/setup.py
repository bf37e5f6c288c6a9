"""Refuse to build if the embedded wordlist does not verify."""

import hashlib
from pathlib import Path

from setuptools import setup
from setuptools.command.build_py import build_py

ASSET = Path(__file__).parent / "src" / "layerkey" / "data" / "eff_large_wordlist.txt"
EXPECTED_SHA256 = "addd35536511597a02fa0a9ff1e5284677b8883b83e986e43f15a3db996b903e"


class VerifiedBuildPy(build_py):
    def run(self):
        digest = hashlib.sha256(ASSET.read_bytes()).hexdigest()
        if digest != EXPECTED_SHA256:
            raise SystemExit(f"wordlist integrity check failed: sha256 {digest}")
        super().run()


setup(cmdclass={"build_py": VerifiedBuildPy})
