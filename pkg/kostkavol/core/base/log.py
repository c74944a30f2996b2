import logging
import os
import sys
from typing import Optional


class GlobalLogger:
    """
    Singleton class for managing global logging of the estimation pipeline.

    Output goes to stderr; stdout is reserved for the machine-readable results
    printed by the command-line front-end.
    """

    _logger = None
    _default_level = "WARNING"

    @classmethod
    def initialize(cls, name="kostkavol", extra_handler: Optional[logging.Handler] = None, level: Optional[str] = None):
        """
        Initialize the global logger.

        Parameters:
        - name (str): Name of the logger.
        - extra_handler (logging.Handler, optional): An additional handler (e.g., a file handler).
        - level (str, optional): Log level name. Falls back to KOSTKAVOL_LOG_LEVEL, then WARNING.
        """
        if cls._logger is None:
            cls._logger = logging.getLogger(name)
            handler = logging.StreamHandler(sys.stderr)
            formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
            handler.setFormatter(formatter)
            cls._logger.addHandler(handler)
            cls._logger.propagate = False
            cls._logger.setLevel(cls._resolve_level(None))

        if level is not None:
            cls._logger.setLevel(cls._resolve_level(level))

        # Ensure extra handler is attached even if logger was already initialized
        if extra_handler and not any(isinstance(h, type(extra_handler)) for h in cls._logger.handlers):
            cls._logger.addHandler(extra_handler)

    @classmethod
    def _resolve_level(cls, level: Optional[str]) -> int:
        name = (level or os.getenv("KOSTKAVOL_LOG_LEVEL") or cls._default_level).upper()
        resolved = logging.getLevelName(name)
        if not isinstance(resolved, int):
            raise ValueError(f"Unknown log level '{name}'.")
        return resolved

    @classmethod
    def _ensure_initialized(cls):
        """
        Ensure that the logger is initialized. If not, initialize with default settings.
        """
        if cls._logger is None:
            cls.initialize()

    @classmethod
    def has_handler(cls, handler_type):
        """ Check if a specific type of handler is attached """
        return any(isinstance(h, handler_type) for h in cls._logger.handlers) if cls._logger else False

    @classmethod
    def log(cls, message, level="info", name="global_log", metadata=None):
        """
        Log a message using the global logger.

        Parameters:
        - message (str): The message to log.
        - level (str): The log level (e.g., 'debug', 'info', 'error').
        - name (str): The name of the log entry, used as a prefix.
        - metadata (dict, optional): Extra key/value pairs appended in sorted order.
        """
        cls._ensure_initialized()
        text = f"[{name}] {message}"
        if metadata:
            text += " | " + " ".join(f"{key}={metadata[key]}" for key in sorted(metadata))
        getattr(cls._logger, level.lower(), cls._logger.info)(text)

    @classmethod
    def log_event(cls, *args, **kwargs):
        """
        Alias for the `log` method.
        """
        cls.log(*args, **kwargs)

    @classmethod
    def reset(cls):
        """Detach all handlers and forget the logger (used by tests)."""
        if cls._logger is not None:
            for handler in list(cls._logger.handlers):
                cls._logger.removeHandler(handler)
        cls._logger = None
