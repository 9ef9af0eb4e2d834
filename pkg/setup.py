from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python install: optest.rng falls back to the numpy backend.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "optest._rng_cy",
                ["src/optest/_rng_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
