# Builds the optional compiled kernel extension. The package works without it:
# holo._kernel falls back to the vectorized numpy implementation when the
# extension is absent, so a failed compile only costs speed, not correctness.
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HOLO_NO_EXT", "") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "holo._kernel._cy",
                    ["src/holo/_kernel/_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
