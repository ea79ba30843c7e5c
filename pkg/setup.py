import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("KEPLER_QALG_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "kepler_qalg._ckernel",
            ["src/kepler_qalg/_ckernel.pyx"],
            language="c++",
            extra_compile_args=["-O3", "-std=c++17"],
        )
        ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
