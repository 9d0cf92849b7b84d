"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a missing compiler or Cython only costs speed.
Set VOLSEL_SKIP_EXT=1 to force a pure-Python build.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("VOLSEL_SKIP_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext = Extension(
            "volsel._kernels",
            ["src/volsel/_kernels.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
        ext.optional = True
        ext_modules = cythonize([ext], language_level="3")
    except ImportError:
        pass

setup(ext_modules=ext_modules)
