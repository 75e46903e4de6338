"""
Exact zeta functions and monodromy checks for plane meromorphic germs
"""

__version__ = "1.0.0"
