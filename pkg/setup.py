"""Build script.

The package is pure Python; the one hot loop (mod-L integer row reduction
feeding every cohomology computation) also exists as a small Cython extension.
If Cython or a C compiler is unavailable the build quietly skips the extension
and the package falls back to the pure implementation at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/profinity/_speedups.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print("profinity: building without compiled speedups (%s)" % exc)

setup(ext_modules=ext_modules)
