"""Build script for the compiled kernel extension.

The extension links against numpy's static distribution library so that the
Cython kernels draw from the exact same bit stream, with the exact same
binomial/normal/exponential algorithms, as ``numpy.random.Generator``.  If
the toolchain is unavailable the package still installs; the pure-Python
kernels are selected at import time.
"""

import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    npyrandom_dir = os.path.join(os.path.dirname(np.random.__file__), "lib")
    ext = Extension(
        "percolimit._kernels._ckern",
        ["src/percolimit/_kernels/_ckern.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[npyrandom_dir],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
