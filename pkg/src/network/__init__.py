from .geometry import PipeGeometry, SoilLayerProfile, lens_area, pipe_geometry, soil_layer_profile
from .topology import NetworkTopology, PipeRun

__all__ = [
    "NetworkTopology",
    "PipeGeometry",
    "PipeRun",
    "SoilLayerProfile",
    "lens_area",
    "pipe_geometry",
    "soil_layer_profile",
]
