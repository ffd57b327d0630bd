"""Preprojective algebras of Dynkin species over finite fields, their
Auslander-Reiten combinatorics, almost Koszul resolutions, Nakayama
automorphisms and Segre products."""

__version__ = "0.1.0"
