"""Build glue: compiles the adamslab extension through cargo.

The sandbox package mirror carries no Rust-aware build backend, so this
drives `cargo build -p adams-py --release` directly and copies the cdylib
into place. Works for both `pip wheel` and editable installs
(`pip install -e . --no-build-isolation`).
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

CRATE_DIR = Path(__file__).resolve().parent
WORKSPACE = CRATE_DIR.parent.parent


class CargoBuildExt(build_ext):
    def build_extension(self, ext):
        subprocess.check_call(
            ["cargo", "build", "-p", "adams-py", "--release"], cwd=WORKSPACE
        )
        suffix = "dylib" if sys.platform == "darwin" else "so"
        built = WORKSPACE / "target" / "release" / f"libadamslab.{suffix}"
        if not built.exists():
            raise FileNotFoundError(built)
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built, target)


setup(
    ext_modules=[Extension("adamslab", sources=[])],
    cmdclass={"build_ext": CargoBuildExt},
)
