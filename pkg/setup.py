"""Build script for the optional compiled SMO core.

The extension is marked optional: if Cython or a C compiler is missing the
install still succeeds and the package falls back to the pure-numpy solver
lane at import time.  -ffp-contract=off keeps the compiled lane bit-identical
to the numpy lane (no fused multiply-add in the error-cache update).
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "noisefp._smo_cy",
        ["src/noisefp/_smo_cy.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-ffp-contract=off"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    if cythonize is not None
    else [],
)
