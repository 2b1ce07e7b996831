"""Build script: compiles the Cython trajectory kernels when possible.

The compiled extension is optional.  If Cython or a C compiler is missing
the package installs anyway and falls back to the pure-numpy kernels at
import time (see cavmmst.kernels).
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "cavmmst.kernels._cykernels",
                ["src/cavmmst/kernels/_cykernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"cavmmst: skipping compiled kernels ({exc!r}); "
          "pure-python fallback will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
