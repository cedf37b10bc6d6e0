"""
Exceptions du package shearlab
"""

from typing import Optional, Tuple


class ShearlabError(Exception):
    """Erreur de base du package"""


class ConfigError(ShearlabError):
    """Clé de configuration inconnue ou valeur invalide"""


class FormatError(ShearlabError):
    """Fichier binaire ou manifeste mal formé (magic, en-tête, version)"""


class NumericalError(ShearlabError):
    """Échec numérique : non-convergence, dénominateur quasi nul"""


class DualFilterError(NumericalError):
    """Somme des |ψ̂|² trop petite pour calculer les filtres duaux"""

    def __init__(self, message: str, frequency: Optional[Tuple[int, int]] = None, value: float = 0.0):
        super().__init__(message)
        self.frequency = frequency
        self.value = value
