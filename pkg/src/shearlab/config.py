"""
Configuration centralisée : défauts, variables d'environnement, fichier clé=valeur
"""

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv, dotenv_values

from .errors import ConfigError
from .utils import Logger, ensure_directory

# Charger les variables d'environnement (.env du répertoire courant)
load_dotenv()

ENV_PREFIX = "SHEARLAB_"
# SHEARLAB_CACHE désigne le champ cache_dir
_ALIASES = {"cache": "cache_dir"}


def get_project_root() -> Path:
    """Retourne le répertoire racine du projet"""
    return Path(__file__).resolve().parent.parent.parent


def _default_cache_dir() -> str:
    return os.getenv("SHEARLAB_CACHE", str(get_project_root() / "cache"))


def _env(name: str, default: str) -> str:
    return os.getenv(ENV_PREFIX + name.upper(), default)


def _parse_bool(raw: str) -> bool:
    return str(raw).strip().lower() in ("1", "true", "yes", "oui", "on")


@dataclass
class ShearlabConfig:
    """Paramètres par défaut des transformées, mesures et caches"""

    # Grille pseudo-polaire / FDST
    size: int = field(default_factory=lambda: int(_env("size", "64")),
                      metadata={"doc": "côté N de l'image (puissance de 2)"})
    oversampling: int = field(default_factory=lambda: int(_env("oversampling", "8")),
                              metadata={"doc": "suréchantillonnage radial R (pair)"})
    m0: Optional[float] = field(default_factory=lambda: (float(_env("m0", "")) if _env("m0", "") else None),
                                metadata={"doc": "dénominateur de Fourier m0 (défaut 2(RN+1)/R)"})
    choice: int = field(default_factory=lambda: int(_env("choice", "1")),
                        metadata={"doc": "base de poids : 0 exacte, 1 (5 fonctions), 2 (lignes radiales)"})

    # DSST / DNST
    scales: int = field(default_factory=lambda: int(_env("scales", "4")),
                        metadata={"doc": "nombre d'échelles J des transformées séparable et non séparable"})
    c1: float = field(default_factory=lambda: float(_env("c1", "1.0")),
                      metadata={"doc": "constante d'échantillonnage des translations (axe 1)"})
    c2: float = field(default_factory=lambda: float(_env("c2", "1.0")),
                      metadata={"doc": "constante d'échantillonnage des translations (axe 2)"})
    phi_mode: str = field(default_factory=lambda: _env("phi_mode", "skip"),
                          metadata={"doc": "convolution Φ_k du cisaillement numérique : skip ou table"})
    wavelet: str = field(default_factory=lambda: _env("wavelet", "sym4"),
                         metadata={"doc": "ondelette orthonormée PyWavelets des filtres h, g"})
    fan_size: int = field(default_factory=lambda: int(_env("fan_size", "31")),
                          metadata={"doc": "taille (impaire, ≥ 15) du filtre en éventail"})
    fan_transition: float = field(default_factory=lambda: float(_env("fan_transition", "0.1")),
                                  metadata={"doc": "largeur de la transition en cosinus surélevé (cycles)"})

    # Solveurs
    cg_tol: float = field(default_factory=lambda: float(_env("cg_tol", "1e-6")),
                          metadata={"doc": "tolérance relative du gradient conjugué"})
    cg_maxiter: int = field(default_factory=lambda: int(_env("cg_maxiter", "500")),
                            metadata={"doc": "nombre maximal d'itérations du gradient conjugué"})

    # Exécution
    threads: int = field(default_factory=lambda: int(_env("threads", "1")),
                         metadata={"doc": "nombre de threads déclaré (enregistré dans les rapports)"})
    seed: int = field(default_factory=lambda: int(_env("seed", "42")),
                      metadata={"doc": "graine SplitMix64 des images de test"})
    cache_dir: str = field(default_factory=_default_cache_dir,
                           metadata={"doc": "répertoire de cache des poids et filtres (SHEARLAB_CACHE)"})
    progress: bool = field(default_factory=lambda: _parse_bool(_env("progress", "true")),
                           metadata={"doc": "afficher les barres de progression"})
    log_level: str = field(default_factory=lambda: _env("log_level", "INFO"),
                           metadata={"doc": "niveau de log du logger 'shearlab'"})

    @classmethod
    def field_names(cls) -> Dict[str, str]:
        """Nom et documentation de chaque champ"""
        return {f.name: f.metadata.get("doc", "") for f in fields(cls)}

    @classmethod
    def from_file(cls, path: str, base: Optional["ShearlabConfig"] = None) -> "ShearlabConfig":
        """Charge un fichier clé=valeur (syntaxe .env) par-dessus la configuration de base"""
        if not Path(path).is_file():
            raise ConfigError(f"Fichier de configuration introuvable: {path}")
        values = dotenv_values(path)
        return (base or cls()).with_overrides(values)

    def with_overrides(self, values: Dict[str, Any]) -> "ShearlabConfig":
        """Nouvelle configuration avec les valeurs fournies (les None sont ignorés)"""
        known = {f.name: f for f in fields(self)}
        updates = {}
        for raw_key, raw_value in values.items():
            key = raw_key.lower()
            if key.startswith(ENV_PREFIX.lower()):
                key = key[len(ENV_PREFIX):]
            key = _ALIASES.get(key, key)
            if key not in known:
                raise ConfigError(f"Clé de configuration inconnue: {raw_key}")
            if raw_value is None:
                continue
            updates[key] = self._coerce(key, raw_value)
        config = replace(self, **updates)
        config.validate()
        return config

    def _coerce(self, key: str, raw: Any) -> Any:
        current = getattr(self, key)
        try:
            if key == "m0":
                return None if raw in ("", "none", "None") else float(raw)
            if isinstance(current, bool):
                return raw if isinstance(raw, bool) else _parse_bool(raw)
            if isinstance(current, int):
                return int(raw)
            if isinstance(current, float):
                return float(raw)
            return str(raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Valeur invalide pour {key}: {raw!r} ({e})") from e

    def validate(self) -> None:
        """Vérifie les contraintes élémentaires des champs"""
        if self.size < 2 or self.size & (self.size - 1):
            raise ConfigError(f"size doit être une puissance de 2: {self.size}")
        if self.oversampling < 2 or self.oversampling % 2:
            raise ConfigError(f"oversampling doit être pair et ≥ 2: {self.oversampling}")
        if self.choice not in (0, 1, 2):
            raise ConfigError(f"choice inconnu: {self.choice}")
        if self.scales < 1:
            raise ConfigError(f"scales doit être ≥ 1: {self.scales}")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ConfigError("c1 et c2 doivent être strictement positifs")
        if self.phi_mode not in ("skip", "table"):
            raise ConfigError(f"phi_mode inconnu: {self.phi_mode}")
        if self.fan_size < 15 or self.fan_size % 2 == 0:
            raise ConfigError(f"fan_size doit être impair et ≥ 15: {self.fan_size}")
        if not 0 < self.fan_transition < 0.5:
            raise ConfigError(f"fan_transition hors de ]0, 0.5[: {self.fan_transition}")
        if self.cg_tol <= 0 or self.cg_maxiter < 1:
            raise ConfigError("cg_tol et cg_maxiter doivent être positifs")
        if self.threads < 1:
            raise ConfigError(f"threads doit être ≥ 1: {self.threads}")

    @property
    def weights_cache(self) -> Path:
        return Path(self.cache_dir) / "weights"

    @property
    def filters_cache(self) -> Path:
        return Path(self.cache_dir) / "filters"

    def ensure_directories(self) -> None:
        """Créer les répertoires de cache s'ils n'existent pas"""
        ensure_directory(self.weights_cache)
        ensure_directory(self.filters_cache)

    def to_dict(self) -> Dict[str, Any]:
        """Convertit en dictionnaire"""
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def print_config(self) -> None:
        """Afficher la configuration actuelle"""
        Logger.info("=== Configuration ===")
        for name, value in self.to_dict().items():
            Logger.info(f"{name}: {value}")
        Logger.info("===================")
