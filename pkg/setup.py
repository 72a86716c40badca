"""Build script: compiles the optional geometry kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile is downgraded to a warning instead of
aborting the install.  Set DEIXIS_NO_EXT=1 to skip the compile entirely.
"""

import os
import warnings

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("DEIXIS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "deixis.geometry._fastkern",
                    ["src/deixis/geometry/_fastkern.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        warnings.warn("Cython not available; installing with the pure-Python geometry kernels")

setup(ext_modules=ext_modules)
