"""Build script: compiles the Cython kernels when Cython is available.

Without Cython (or a compiler) the package still installs and falls back
to the numpy implementation in ``chanmatch._kernels_py``.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CHANMATCH_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "chanmatch._kernels",
            ["src/chanmatch/_kernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
