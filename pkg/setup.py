# Builds the optional compiled kernels. If compilation is unavailable the
# install still succeeds and the package runs on the NumPy fallback.
import numpy
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "asympint._kernels._fastkern",
                ["src/asympint/_kernels/_fastkern.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
