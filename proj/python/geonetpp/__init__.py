"""Geometric depth/normal refinement: pinhole unprojection, tangent-plane
normal estimation, normal-guided depth voting, edge-aware recursive filtering,
and 3D-aware evaluation metrics."""

try:
    from ._geonetpp import *  # noqa: F401,F403
except ImportError:  # in-tree builds keep the extension next to this package
    from _geonetpp import *  # noqa: F401,F403
