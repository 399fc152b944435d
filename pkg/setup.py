from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("skipsim._ratc", ["src/skipsim/_ratc.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except Exception:
    # No Cython or no compiler: the pure-Python rational backend is used.
    ext_modules = []

setup(ext_modules=ext_modules)
