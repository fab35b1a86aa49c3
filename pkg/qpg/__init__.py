"""
Quantum Potential Games - learning dynamics for two-player quantum
common-interest games (lin-QREP_q flow, lin-MMWU update), Nash/KKT
diagnostics and a Best-Separable-State oracle
"""

__version__ = "1.0.0"
__author__ = "QPG Team"
