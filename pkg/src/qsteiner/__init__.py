"""Binary q-analogs of Steiner triple systems: GF(2) subspaces, Kramer-Mesner
matrices, order-3 automorphism theory and a dancing-links search campaign."""

__version__ = "0.1.0"
