"""Build script for the optional compiled kernels.

The package is fully functional without the extension; ``reesdensity.backend``
falls back to the pure-Python kernels if the build was skipped or failed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "reesdensity._speedups",
                ["src/reesdensity/_speedups.pyx"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
