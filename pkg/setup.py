"""Build glue for the optional compiled core.

The package works without the extension (pure-Python fallback); build
failures therefore degrade to a warning instead of aborting the install.
"""

import sys

from setuptools import setup


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("gridarena: Cython not available, building pure-Python only",
              file=sys.stderr)
        return []
    from setuptools import Extension

    ext = Extension(
        "gridarena._kernel",
        ["src/gridarena/_kernel.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extensions())
