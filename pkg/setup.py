"""Build the optional compiled kernels.

The extension is marked optional: when no compiler is available the
package still installs and falls back to ``graphseg._pure`` at import.
"""
import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "graphseg._core",
        ["src/graphseg/_core.pyx"],
        include_dirs=[np.get_include()],
        language="c++",
        # no FMA contraction: weights must match the pure-Python path bit for bit
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
)
