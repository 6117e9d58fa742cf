"""Projected Stratonovich SDE integrators on constraint manifolds."""

try:
    # installed wheel: the extension lives inside the package
    from ._strata import *  # noqa: F401,F403
    from ._strata import __version__  # noqa: F401
except ImportError:
    # in-tree build: the extension sits on PYTHONPATH next to the build dir
    from _strata import *  # noqa: F401,F403
    from _strata import __version__  # noqa: F401
