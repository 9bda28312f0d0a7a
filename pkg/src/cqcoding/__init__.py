"""Finite-blocklength coding tools for classical-quantum channels.

Capacity by a certified multiplicative update, typical sequences and
projectors, greedy maximal codes with their size bounds, and seeded
Monte Carlo checks of the inequalities behind them.
"""

__version__ = "0.1.0"
