"""
machstem
--------
Planar shock stability and steady Mach stem construction for the 2-D compressible
Euler equations with a complete equation of state.

Version: 1.0.0
"""

__version__ = "1.0.0"
