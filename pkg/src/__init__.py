"""QSD toolkit - quantum state distinguishability at desk scale"""

__version__ = "0.1.0"
__author__ = "QSD Toolkit Team"
