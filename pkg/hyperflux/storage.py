"""Directory layout and JSON artifact files for hyperflux."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

from .config import Config
from .errors import HyperfluxError
from .kz import ResidueFamily
from .series import TruncatedSeries

logger = logging.getLogger(__name__)

KINDS = ("series", "families", "schemes", "reports")


class ArtifactStore:
    """Manages the output directory of series, families, schemes and reports."""

    def __init__(self, config: Config):
        self.config = config
        self.root = config.output_path
        self.paths = {kind: self.root / kind for kind in KINDS}

    def ensure_directories(self) -> None:
        """Create all artifact directories."""
        for dir_path in self.paths.values():
            dir_path.mkdir(parents=True, exist_ok=True)

    def path_for(self, kind: str, name: str, suffix: str = ".json") -> Path:
        if kind not in self.paths:
            raise HyperfluxError(f"unknown artifact kind {kind!r}")
        return self.paths[kind] / f"{name}{suffix}"

    def write_json(self, kind: str, name: str, data: Dict[str, Any]) -> Path:
        path = self.path_for(kind, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2)
        logger.debug(f"Wrote {path}")
        return path

    def write_text(self, kind: str, name: str, text: str, suffix: str) -> Path:
        path = self.path_for(kind, name, suffix)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.debug(f"Wrote {path}")
        return path

    @staticmethod
    def read_json(path: Union[str, Path]) -> Dict[str, Any]:
        """Load a JSON artifact from any path."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise HyperfluxError(f"cannot read {path}: {e}") from e

    def save_series(self, name: str, series: TruncatedSeries) -> Path:
        return self.write_json("series", name, series.to_json())

    def load_series(self, path: Union[str, Path]) -> TruncatedSeries:
        return TruncatedSeries.from_json(self.read_json(path))

    def save_family(self, name: str, family: ResidueFamily) -> Path:
        return self.write_json("families", name, family.to_json())

    def load_family(self, path: Union[str, Path]) -> ResidueFamily:
        return ResidueFamily.from_json(self.read_json(path))

    def save_report(self, name: str, report: Dict[str, Any]) -> Path:
        return self.write_json("reports", name, report)

    def list_artifacts(self, kind: str) -> List[Path]:
        """Files written under one artifact kind, sorted by name."""
        directory = self.paths.get(kind)
        if directory is None or not directory.exists():
            return []
        return sorted(p for p in directory.iterdir() if p.is_file())
