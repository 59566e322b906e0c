"""teamgame - equilibria of multi-principal team mechanism games on finite spaces."""

__version__ = "0.1.0"
