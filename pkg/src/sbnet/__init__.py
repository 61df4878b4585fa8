"""Sigmoid belief networks that approximate binary Markov kernels."""
from .netcore import Kernel, Layer, Network, layer_kernel, network_kernel

__version__ = "0.1.0"

__all__ = ["Kernel", "Layer", "Network", "layer_kernel", "network_kernel"]
