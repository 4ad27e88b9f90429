import os

import numpy as np
from setuptools import Extension, setup

DIRECTIVES = {
    "language_level": "3",
    "boundscheck": False,
    "wraparound": False,
    "cdivision": True,
}


def ext_modules():
    if os.environ.get("COINREC_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    exts = [
        Extension(
            "coinrec._kernels",
            ["src/coinrec/_kernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            # no -ffast-math: results must match the numpy fallback bit for bit
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )
    ]
    return cythonize(exts, compiler_directives=DIRECTIVES)


setup(ext_modules=ext_modules())
