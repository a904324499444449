"""Boundedness of positive Bergman-type operators on symmetric cones."""
from .cones import ConeDescriptor, HALFLINE, LORENTZ3, SPD2

__version__ = "0.1.0"
