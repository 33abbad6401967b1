"""Spiking assembly circuits with synaptic propagation delays."""

__version__ = '0.1.0'
