"""Build script for the optional compiled kernels.

The package works without the extension: dagsched._backend falls back to the
pure-Python kernels when dagsched._kernels is not importable. Set
DAGSCHED_NO_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Try to build the accelerator; warn and continue on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain, ...
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        print(f"WARNING: compiled kernels not built ({exc}); "
              "the pure-Python fallback will be used")


ext_modules = []
if os.environ.get("DAGSCHED_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize

        # No -ffast-math: the compiled kernels must stay bit-identical to the
        # pure-Python fallback.
        ext_modules = cythonize(
            [
                Extension(
                    "dagsched._kernels",
                    ["src/dagsched/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
