import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_module = Extension(
        "thermodelay._stepper",
        ["src/thermodelay/_stepper.pyx"],
        include_dirs=[np.get_include()],
    )
    ext_modules = cythonize([ext_module], language_level=3)

setup(ext_modules=ext_modules)
