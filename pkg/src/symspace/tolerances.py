"""Global numerical tolerances.

``EXACT`` guards identities that hold exactly in real arithmetic (Jacobi,
antisymmetry, orthonormality); ``ACCUMULATED`` guards quantities built from
longer chains of floating point operations.
"""

from contextlib import contextmanager

EXACT = 1e-10
ACCUMULATED = 1e-9


def set_tolerances(exact=None, accumulated=None):
    global EXACT, ACCUMULATED
    if exact is not None:
        EXACT = float(exact)
    if accumulated is not None:
        ACCUMULATED = float(accumulated)


@contextmanager
def overridden(exact=None, accumulated=None):
    saved = (EXACT, ACCUMULATED)
    set_tolerances(exact, accumulated)
    try:
        yield
    finally:
        set_tolerances(*saved)
