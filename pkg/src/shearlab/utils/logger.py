"""
Logger centralisé avec emojis pour les transformées en shearlets
"""

import logging

_logger = logging.getLogger("shearlab")


class Logger:
    """Logger simple avec emojis et niveaux"""

    @staticmethod
    def success(message: str) -> None:
        """Message de succès"""
        _logger.info(f"✅ {message}")

    @staticmethod
    def error(message: str) -> None:
        """Message d'erreur"""
        _logger.error(f"❌ {message}")

    @staticmethod
    def warning(message: str) -> None:
        """Message d'avertissement"""
        _logger.warning(f"⚠️  {message}")

    @staticmethod
    def info(message: str) -> None:
        """Message d'information"""
        _logger.info(f"ℹ️  {message}")

    @staticmethod
    def debug(message: str) -> None:
        """Message de debug"""
        _logger.debug(f"🐛 {message}")

    @staticmethod
    def loading(message: str) -> None:
        """Message de chargement / calcul en cours"""
        _logger.info(f"🔄 {message}")

    @staticmethod
    def rocket(message: str) -> None:
        """Message de démarrage"""
        _logger.info(f"🚀 {message}")

    @staticmethod
    def stats(message: str) -> None:
        """Message de statistiques"""
        _logger.info(f"📊 {message}")

    @staticmethod
    def save(message: str) -> None:
        """Message d'écriture sur disque"""
        _logger.info(f"💾 {message}")

    @staticmethod
    def is_verbose() -> bool:
        """Indique si les messages INFO sont émis (utilisé pour les barres tqdm)"""
        return _logger.isEnabledFor(logging.INFO)
