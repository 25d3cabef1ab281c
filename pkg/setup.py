from setuptools import Extension, setup
from Cython.Build import cythonize

ext_module = Extension(
    "isolume._kernels._core",
    ["src/isolume/_kernels/_core.pyx"],
    extra_compile_args=["-O3"],
)

setup(
    ext_modules=cythonize([ext_module], language_level=3),
)
