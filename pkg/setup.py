"""Build script for the optional compiled kernel.

The package is fully functional without the extension: `karelfix.kernels`
falls back to the pure-Python implementation when the compiled module is
missing (or when KARELFIX_PURE=1 is set).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("karelfix.kernels._fast", ["src/karelfix/kernels/_fast.pyx"])],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
