import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python fallback kernel is used when the extension is absent.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "frtsim._speedups",
                ["src/frtsim/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
