"""RISC-V hardware-performance-monitoring stack over an emulated hart PMU.

The heavy lifting lives in the _hpmstack extension module; this package
re-exports its surface.
"""

try:
    from ._hpmstack import *          # packaged layout  # noqa: F401,F403
    from . import _hpmstack as _core  # noqa: F401
except ImportError:
    from _hpmstack import *           # in-tree build layout  # noqa: F401,F403
    import _hpmstack as _core         # noqa: F401

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__version__ = "0.1.0"
