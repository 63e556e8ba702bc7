"""Build script for the compiled training kernel.

The package works without the extension (a numpy fallback is selected at
import time), so the extension is marked optional: a failed compile degrades
to the slow path instead of breaking the install.
"""

import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None and os.path.exists("src/hyperdive/_train_inner.pyx"):
    import numpy as np

    extensions = cythonize(
        [
            Extension(
                "hyperdive._train_inner",
                ["src/hyperdive/_train_inner.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
    for ext in extensions:
        ext.optional = True
else:
    extensions = []

setup(ext_modules=extensions)
