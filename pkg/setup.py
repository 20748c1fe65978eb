import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("UAVTRAJ_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "uavtraj._kernels_cy",
                    ["src/uavtraj/_kernels_cy.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython: the package still works on the pure-Python kernels.
        ext_modules = []

setup(ext_modules=ext_modules)
