"""Finite-dimensional Wasserstein diffusion toolkit (python bindings)."""

try:
    from ._core import *  # noqa: F401,F403  (installed layout)
    from . import _core as core  # noqa: F401
except ImportError:  # in-tree layout: _core.so lives on sys.path directly
    from _core import *  # noqa: F401,F403
    import _core as core  # noqa: F401

__all__ = [n for n in dir(core) if not n.startswith("_")]
__version__ = "0.1.0"
