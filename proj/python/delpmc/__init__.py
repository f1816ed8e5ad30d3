"""Delaunay surfaces, Jacobi-operator degeneracy structure, and the
prescribed almost-constant mean-curvature solver."""

try:
    from ._delpmc import *  # noqa: F401,F403
    from ._delpmc import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package
    from _delpmc import *  # noqa: F401,F403
    from _delpmc import __version__  # noqa: F401
