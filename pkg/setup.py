"""Build script: compiles the optional fast-kernel extension when a toolchain
is available, otherwise installs pure-Python only (the package falls back at
import time)."""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "fggcd._kernels._fast",
                ["src/fggcd/_kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - toolchain-dependent
    print(f"fggcd: skipping fast-kernel extension ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
