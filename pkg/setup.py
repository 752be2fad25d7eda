import numpy as np
from setuptools import setup

# The compiled kernels are optional: without Cython (or a C compiler) the
# package falls back to the vectorized numpy implementation at import time.
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "slitchain._kernels",
                ["src/slitchain/_kernels.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
