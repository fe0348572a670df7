import os

import numpy
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("KOEBE_MINIMAL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        extensions = [
            Extension(
                "koebe_minimal._ckernels",
                ["src/koebe_minimal/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ]
        ext_modules = cythonize(extensions, language_level="3")

setup(ext_modules=ext_modules)
