from typing import Optional
from kostkavol.core.base.log import GlobalLogger


class LoggingMixin:
    """
    Mixin for components that report progress through GlobalLogger.
    """

    def _initialize_logger(self, name: str, level: Optional[str] = None) -> None:
        """
        Initialize the logger, delegating to GlobalLogger.

        Parameters:
        - name (str): Name used to prefix this component's log entries.
        - level (Optional[str]): Log level to apply to the global logger, if given.
        """
        GlobalLogger.initialize(level=level)
        self.logger = GlobalLogger
        self.log_name = name

    def log_event(self, message, level="info", metadata=None):
        """
        Log an event using GlobalLogger under this component's name.
        """
        if not hasattr(self, "logger"):
            self._initialize_logger(type(self).__name__)
        self.logger.log_event(message, level=level, name=self.log_name, metadata=metadata)

    def log(self, *args, **kwargs):
        """
        Alias for log_event to maintain consistency.
        """
        self.log_event(*args, **kwargs)
