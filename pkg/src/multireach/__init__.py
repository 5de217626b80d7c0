"""Multiple reachability for planar linear dynamical systems."""
__version__ = "0.1.0"
