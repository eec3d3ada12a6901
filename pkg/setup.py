"""Build script for the optional compiled core.

The package works without the extension (a pure NumPy backend is selected at
import time), so a failed build degrades gracefully instead of aborting the
install.  Set USTATCLUST_NO_EXT=1 to skip the extension on purpose.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("USTATCLUST_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "ustatclust._core",
                    ["src/ustatclust/_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except Exception as exc:  # Cython or numpy missing, or no compiler
        print(f"warning: compiled core skipped ({exc}); pure NumPy backend will be used")

setup(ext_modules=ext_modules)
