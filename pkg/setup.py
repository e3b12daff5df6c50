"""Build the optional compiled kernels.

The package works without the extension: squeezecav.kernels falls back to
the pure NumPy implementation when squeezecav._kernels_cy is not importable.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "squeezecav._kernels_cy",
                ["src/squeezecav/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
