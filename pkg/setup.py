from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/fedcollab/_kernels/_closure.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # The package still works without the compiled kernel; fedcollab._kernels
    # falls back to the numpy implementation at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
