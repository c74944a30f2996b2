import csv
import io
import os
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional

from .subutilities.formatting import Formatting


class Utils(Formatting):
    def __init__(self):
        self.timings: Dict[str, float] = {}

    def _get_env_path(self, env_var: str, explicit: Optional[str]) -> Optional[str]:
        """
        Resolve a file path from an explicit argument or an environment variable.

        Args:
            env_var (str): Environment variable consulted when no explicit path is given.
            explicit (str): Path passed by the caller.

        Returns:
            str: Resolved path, or None when neither is set.
        """
        if explicit:
            return explicit
        if (path_from_env := os.getenv(env_var)):
            return path_from_env
        return None

    @contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        """Record wall-clock seconds spent in `stage`."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[stage] = self.timings.get(stage, 0.0) + (time.perf_counter() - start)

    @staticmethod
    def flatten(record: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
        """Flatten nested dictionaries and lists into dotted keys (for CSV output)."""
        flat: Dict[str, Any] = {}
        for key, value in record.items():
            name = f"{prefix}{key}"
            if isinstance(value, dict):
                flat.update(Utils.flatten(value, prefix=f"{name}."))
            elif isinstance(value, (list, tuple)):
                for index, item in enumerate(value):
                    if isinstance(item, dict):
                        flat.update(Utils.flatten(item, prefix=f"{name}.{index}."))
                    else:
                        flat[f"{name}.{index}"] = item
            else:
                flat[name] = value
        return flat

    def to_csv(self, records: List[Dict[str, Any]]) -> str:
        rows = [self.flatten(record) for record in records]
        columns: List[str] = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return buffer.getvalue()
