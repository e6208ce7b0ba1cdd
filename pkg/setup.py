"""Build the optional compiled kernels.

The package works without them; ``covert_route.kernels`` falls back to the
pure-Python implementations when the extension is missing.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("COVERT_ROUTE_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "covert_route._kernels",
                    ["src/covert_route/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
