"""Joint Trajectory Map toolkit: encode 3D skeleton action sequences into
color trajectory images, with view-rotation augmentation, late score fusion
and a desk-scale evaluation loop."""

__version__ = "0.1.0"

from .encoding import EncodingParams, Level
from .geometry import Plane, ViewAngles, ViewGrid, enumerate_views
from .rasterizer import RenderOptions, render_all, render_jtm
from .skeleton import SequenceFormat, SkeletonSequence, parse_sequence, write_sequence

__all__ = [
    "EncodingParams",
    "Level",
    "Plane",
    "RenderOptions",
    "SequenceFormat",
    "SkeletonSequence",
    "ViewAngles",
    "ViewGrid",
    "enumerate_views",
    "parse_sequence",
    "render_all",
    "render_jtm",
    "write_sequence",
    "__version__",
]
