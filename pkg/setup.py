"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension; _kernels/__init__.py
falls back to the pure-Python implementation when the compiled module is
missing. Set PARAMVARIETY_NO_EXTENSION=1 to skip compilation entirely.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Never fail the install because the C toolchain is unavailable."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: skipping compiled kernels ({exc}); "
                  "pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "pure-Python fallback will be used")


ext_modules = []
if not os.environ.get("PARAMVARIETY_NO_EXTENSION"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/paramvariety/_kernels/_speedups.pyx"],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
