"""
Core module - Álgebra exacta, campos, cartas y formato de sistemas.
"""

from .algebra import TIME, ExpSymbol, MultiPoly, RatExpr, format_gaussian, gaussian, parse_gaussian
from .atlas_registry import AtlasRegistry
from .charts import Atlas, Chart, standard_atlas, to_chart, transition, weighted_chart
from .config import SystemConfig, get_system_info
from .field import ChartedSystem, RationalMap, VField, divergence, jacobian_det, lie_derivative, pushforward
from .sysdef import SystemDoc, load_system, parse, roundtrip

__version__ = "1.0.0"

__all__ = [
    "TIME",
    "Atlas",
    "AtlasRegistry",
    "Chart",
    "ChartedSystem",
    "ExpSymbol",
    "MultiPoly",
    "RatExpr",
    "RationalMap",
    "SystemConfig",
    "SystemDoc",
    "VField",
    "divergence",
    "format_gaussian",
    "gaussian",
    "get_system_info",
    "jacobian_det",
    "lie_derivative",
    "load_system",
    "parse",
    "parse_gaussian",
    "pushforward",
    "roundtrip",
    "standard_atlas",
    "to_chart",
    "transition",
    "weighted_chart",
    "__version__",
]
