"""Build script: compiles the optional Cython core.

The package works without the extension (a pure NumPy fallback is selected
at import time); the extension only accelerates the hot kernels, namely
semigroup enumeration and the Volterra marching solvers.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "beurling._native",
                ["src/beurling/_native.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
