"""
entangle: entanglement criteria for general bipartite operator-algebra systems
"""

__version__ = "1.0.0"
