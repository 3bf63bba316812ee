"""Classification of codimension-one transnormal systems on compact 3-manifolds."""

__version__ = "0.1.0"
