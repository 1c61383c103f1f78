import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("LEFSCHETZ_LAB_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "lefschetz_lab._kernels._ckernels",
        ["src/lefschetz_lab/_kernels/_ckernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
