"""Build script for the optional compiled statevector kernels.

The package works without the extension (a pure-numpy fallback is selected
at import time); the Cython module only accelerates the gate-application
inner loops.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pdoenc._kernels",
                ["src/pdoenc/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
