from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the pure-Python kernels are used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("unitary_newforms._kernels", ["src/unitary_newforms/_kernels.pyx"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
