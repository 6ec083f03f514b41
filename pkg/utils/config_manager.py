import os
import logging
from pathlib import Path
from typing import Optional

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

_REPO_ROOT = Path(__file__).resolve().parent.parent
_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigManager:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(ConfigManager, cls).__new__(cls)
            cls._instance._initialize()
        return cls._instance

    def _initialize(self):
        self._max_pages = self._load_max_pages()
        self._log_level = self._load_log_level()
        self._template_dir = self._load_directory("HPSS_TEMPLATE_DIR", "templates")
        self._layout_dir = self._load_directory("HPSS_LAYOUT_DIR", "layouts")
        logging.info("ConfigManager initialized.")

    def reload(self):
        """Re-reads the environment."""
        self._initialize()

    def _load_max_pages(self) -> Optional[int]:
        """Loads the page-iteration cap from HPSS_MAX_PAGES, if set to a positive integer."""
        raw = os.environ.get("HPSS_MAX_PAGES", "").strip()
        if not raw:
            return None
        try:
            value = int(raw)
        except ValueError:
            logging.warning(f"Ignoring HPSS_MAX_PAGES={raw!r}: not an integer.")
            return None
        if value < 1:
            logging.warning(f"Ignoring HPSS_MAX_PAGES={value}: must be at least 1.")
            return None
        return value

    def _load_log_level(self) -> str:
        raw = os.environ.get("HPSS_LOG_LEVEL", "WARNING").strip().upper()
        if raw not in _LOG_LEVELS:
            logging.warning(f"Unknown HPSS_LOG_LEVEL {raw!r}. Using WARNING.")
            return "WARNING"
        return raw

    def _load_directory(self, variable: str, default: str) -> Path:
        raw = os.environ.get(variable, "").strip()
        return Path(raw) if raw else _REPO_ROOT / default

    def get_max_pages(self, spec) -> int:
        """
        Returns the page-iteration cap for an algebra.

        Args:
            spec: The AlgebraSpec being analysed.

        Returns:
            HPSS_MAX_PAGES when set, otherwise n + m + 1.
        """
        if self._max_pages is not None:
            return self._max_pages
        return spec.n + spec.m + 1

    def get_log_level(self) -> str:
        return self._log_level

    def get_template_dir(self) -> Path:
        return self._template_dir

    def get_layout_dir(self) -> Path:
        return self._layout_dir
