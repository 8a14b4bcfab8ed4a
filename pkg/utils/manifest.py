# utils/manifest.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict

from dateutil.parser import isoparse

from csd import __version__
from csd.simkit import CampaignSpec
from utils.settings import ConfigError, spec_from_dict, spec_to_dict
from utils.storageClient import load_file, save_file

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    config_path: str
    spec: CampaignSpec
    started_at: datetime
    finished_at: datetime
    outputs: Dict[str, str] = field(default_factory=dict)
    tool_version: str = __version__

    @property
    def wall_clock_s(self) -> float:
        return (self.finished_at - self.started_at).total_seconds()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool_version": self.tool_version,
            "config_path": self.config_path,
            "started_at": self.started_at.isoformat(),
            "finished_at": self.finished_at.isoformat(),
            "wall_clock_s": round(self.wall_clock_s, 3),
            "outputs": dict(self.outputs),
            "spec": spec_to_dict(self.spec),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        try:
            return cls(
                config_path=data["config_path"],
                spec=spec_from_dict(data["spec"]),
                started_at=isoparse(data["started_at"]),
                finished_at=isoparse(data["finished_at"]),
                outputs=dict(data.get("outputs", {})),
                tool_version=data.get("tool_version", "unknown"),
            )
        except KeyError as e:
            raise ConfigError(f"manifest.{e.args[0]}", "missing required key") from None
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError("manifest", f"bad timestamp: {e}") from None


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def save_manifest(path: str, manifest: RunManifest) -> None:
    save_file(path, manifest.to_dict())
    logger.info(f"[manifest] wrote {path}")


def load_manifest(path: str) -> RunManifest:
    data = load_file(path)
    if data is None:
        raise OSError(f"manifest not found or unreadable: {path}")
    return RunManifest.from_dict(data)
