"""Builds the optional compiled pricing kernels.

If Cython or a C compiler is missing the package still installs and
``dimermagic.kernels`` falls back to numpy.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "dimermagic._pricing",
                ["src/dimermagic/_pricing.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
