"""Service and CLI configuration, loadable from a JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import TREC_SGML
from .ranking import RankingParams
from .recognizer import ErrorModel
from .summarizer import SummaryWeights


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    corpus_path: str | None = None
    corpus_format: str = TREC_SGML
    index_path: str | None = None
    profiles_path: str | None = None
    outbox_dir: str = "outbox"
    ui_dir: str | None = None
    ranking: RankingParams = field(default_factory=RankingParams)
    summary: SummaryWeights = field(default_factory=SummaryWeights)
    error_model: ErrorModel = field(default_factory=ErrorModel)
    confirm_threshold: float = 0.5
    n_recognizers: int = 1
    session_timeout_s: float = 1800.0

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceConfig":
        kwargs = dict(data)
        if "ranking" in kwargs:
            kwargs["ranking"] = RankingParams.from_dict(kwargs["ranking"])
        if "summary" in kwargs:
            kwargs["summary"] = SummaryWeights.from_dict(kwargs["summary"])
        if "error_model" in kwargs:
            kwargs["error_model"] = ErrorModel.from_dict(kwargs["error_model"])
        unknown = set(kwargs) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "host": self.host,
            "port": self.port,
            "corpus_path": self.corpus_path,
            "corpus_format": self.corpus_format,
            "index_path": self.index_path,
            "profiles_path": self.profiles_path,
            "outbox_dir": self.outbox_dir,
            "ui_dir": self.ui_dir,
            "ranking": self.ranking.to_dict(),
            "summary": self.summary.to_dict(),
            "error_model": self.error_model.to_dict(),
            "confirm_threshold": self.confirm_threshold,
            "n_recognizers": self.n_recognizers,
            "session_timeout_s": self.session_timeout_s,
        }


def load_config(path: str | Path) -> ServiceConfig:
    return ServiceConfig.from_dict(json.loads(Path(path).read_text("utf-8")))
