import os

import numpy as np
from setuptools import Extension, setup

# WLAB_NO_EXT=1 builds a pure-Python install; the package then runs on the
# numpy fallback kernels.
ext_modules = []
if not os.environ.get("WLAB_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "waringlab._ckernels",
                ["src/waringlab/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
