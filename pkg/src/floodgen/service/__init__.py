from floodgen.service.app import ServiceState, create_app
from floodgen.service.polygon import polygon_coverage, rasterize_polygon

__all__ = ["create_app", "ServiceState", "rasterize_polygon", "polygon_coverage"]
