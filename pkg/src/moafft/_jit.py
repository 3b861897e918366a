"""numba entry point for the loop-nest kernels.

Kernels are plain Python loops over numpy arrays; setting
``NUMBA_DISABLE_JIT=1`` runs them uncompiled with identical results.
"""
import numba


def njit(fn=None, *, inline=False):
    """Compile ``fn`` with caching and without the GIL.

    ``inline=True`` inlines the function at numba IR level into every
    caller; used for the per-butterfly helper on hot inner loops.
    """
    opts = {"cache": True, "nogil": True}
    if inline:
        opts["inline"] = "always"
    if fn is None:
        return lambda f: numba.njit(**opts)(f)
    return numba.njit(**opts)(fn)
