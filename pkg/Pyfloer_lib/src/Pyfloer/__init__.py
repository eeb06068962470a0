""" Python Package for Fukaya algebras of immersed Lagrangians and their surgeries"""
__version__ = "0.3"
