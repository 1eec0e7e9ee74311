import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install, recursions_python is used instead
    cythonize = None

# python setup.py build_ext --inplace
# PERPSTAT_NO_EXTENSION=1 skips the compiled core entirely.

ext_modules = []
if cythonize is not None and not os.environ.get("PERPSTAT_NO_EXTENSION"):
    ext_modules = cythonize(
        [
            Extension(
                "perpstat.volatility._recursions",
                ["src/perpstat/volatility/_recursions.pyx"],
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
    )

setup(ext_modules=ext_modules)
