"""Build script: compiles the optional C++ kernel extension.

The package works without the extension (a pure-Python twin of every
kernel is selected at import time), so a missing compiler or Cython is
downgraded to a warning instead of a build failure.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "hoca._kernels._speedups",
                ["src/hoca/_kernels/_speedups.pyx"],
                language="c++",
                extra_compile_args=["-O2", "-std=c++17"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"warning: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
