"""Build script: compiles the optional fast kernel extension.

The package works without the extension (a pure-Python twin is selected at
import time), so a failed extension build degrades gracefully.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("limpca._kernels", ["src/limpca/_kernels.pyx"])],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print("kernel extension not built (%s); using pure-Python kernels" % exc)

setup(ext_modules=ext_modules)
