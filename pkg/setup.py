"""Build script for the optional compiled scoring kernel.

The package works without the extension: devrec.index falls back to the
pure-Python kernel when devrec._scoring_cy is missing or when
DEVREC_PURE_PYTHON=1 is set.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("devrec._scoring_cy", ["src/devrec/_scoring_cy.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
