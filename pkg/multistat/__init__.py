"""
multistat: exact counting of positive steady states of polynomial ODE models.
"""
__version__ = "0.1.0"
