"""Build script for the optional compiled geometry kernels.

The hot numeric kernels live in src/citykg/geometry/_kernels.py, written in
Cython "pure Python" mode: the same file runs unmodified on CPython and
compiles to a C extension when Cython and a C compiler are present.  The
extension is marked optional, so the package installs (and works, via the
interpreted kernels) even when compilation fails.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "citykg.geometry._kernels",
                ["src/citykg/geometry/_kernels.py"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
        quiet=True,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
