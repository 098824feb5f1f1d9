"""Build script: compiles the Cython kernels when a toolchain is available.

The package works without the extension (a pure-Python twin of every kernel
is selected at import time), so a failed build only costs speed.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("IETSPEC_PURE", "") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "ietspec._kernels",
                    ["src/ietspec/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
