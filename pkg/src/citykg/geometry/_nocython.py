"""Runtime stand-in for the ``cython`` module.

Imported by ``_kernels`` only when Cython itself is not installed, so the
kernels can execute as plain Python.  Provides exactly the surface the
kernels use; everything is a no-op.
"""

compiled = False


class _TypeMarker:
    """Placeholder for cython.double, cython.Py_ssize_t, ... annotations."""

    def __getitem__(self, item):
        return self

    def __call__(self, value=0):
        return value


double = _TypeMarker()
bint = _TypeMarker()
Py_ssize_t = _TypeMarker()


def cfunc(func):
    return func


def inline(func):
    return func
