"""
Utilitaires fichiers : répertoires, JSON, empreintes pour le cache
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Union

PathLike = Union[str, Path]


def ensure_directory(path: PathLike) -> Path:
    """Créer un répertoire s'il n'existe pas"""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def ensure_parent_directory(file_path: PathLike) -> Path:
    """Créer le répertoire parent d'un fichier s'il n'existe pas"""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    return file_path


def safe_json_dumps(obj: Any) -> str:
    """Sérialise en JSON de façon déterministe (clés triées, NaN et infinis refusés)"""
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True, allow_nan=False)


def cache_key(*parts: Any) -> str:
    """Empreinte courte et stable d'un tuple de paramètres (nom de fichier de cache)"""
    signature = "|".join(str(p) for p in parts)
    return hashlib.sha256(signature.encode("utf-8")).hexdigest()[:16]


