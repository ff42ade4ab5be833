"""Build script for the optional compiled greedy-search kernel.

The package works without the extension: ``rspca.kernels`` falls back to the
pure-numpy implementation when ``rspca._greedy`` is missing.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext = Extension(
        "rspca._greedy",
        ["src/rspca/_greedy.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
        optional=True,
    )
    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})
except ImportError:
    pass

setup(ext_modules=ext_modules)
