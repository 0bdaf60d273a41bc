"""Build script: compiles the optional Cython kernel when Cython is available.

The package works without the extension (a pure-Python twin of the kernel is
selected at import time), so any build failure here is non-fatal: we fall
back to a pure-Python install rather than refusing to install.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SHACLWF_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "shaclwf._kernels",
                    ["src/shaclwf/_kernels.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
