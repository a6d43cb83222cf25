"""User profiles and document delivery.

Profiles live in a small versioned text file (one record per user, PIN
stored only as a salted digest).  Deliveries over email/fax/postal are
simulated by writing the rendered bytes into per-channel outbox
directories; the voice channel is handled by the session, which emits the
same ASCII rendering produced here.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import textwrap
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .corpus import Document

CHANNELS = ("voice", "email", "fax", "postal")
ASCII = "ascii"
KNOWN_FORMATS = ("ascii", "pdf", "postscript", "rdf")

_PROFILE_HEADER = "#profiles:v1"
_WRAP_COLUMNS = 72


class UnsupportedFormatError(ValueError):
    pass


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    salt: str
    pin_digest: str
    delivery_address: dict[str, str] = field(default_factory=dict)
    preferred_format: str = ASCII
    preferred_threshold: float | None = None

    def check_pin(self, pin: str) -> bool:
        return _digest_pin(self.salt, pin) == self.pin_digest


def _digest_pin(salt: str, pin: str) -> str:
    return hashlib.sha256(f"{salt}:{pin}".encode("utf-8")).hexdigest()


class ProfileStore:
    """Read-mostly store of user profiles with serialized writes."""

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path is not None else None
        self._profiles: dict[str, UserProfile] = {}
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        lines = self.path.read_text("utf-8").splitlines()
        if not lines or lines[0].strip() != _PROFILE_HEADER:
            raise ConfigurationError(f"profile file {self.path} missing {_PROFILE_HEADER} header")
        for line in lines[1:]:
            if not line.strip():
                continue
            user_id, payload = line.split("\t", 1)
            data = json.loads(payload)
            self._profiles[user_id] = UserProfile(
                user_id=user_id,
                salt=data["salt"],
                pin_digest=data["pin_digest"],
                delivery_address=data.get("delivery_address", {}),
                preferred_format=data.get("preferred_format", ASCII),
                preferred_threshold=data.get("preferred_threshold"),
            )

    def save(self) -> None:
        if self.path is None:
            return
        lines = [_PROFILE_HEADER]
        for user_id, prof in self._profiles.items():
            record = {
                "salt": prof.salt,
                "pin_digest": prof.pin_digest,
                "delivery_address": prof.delivery_address,
                "preferred_format": prof.preferred_format,
                "preferred_threshold": prof.preferred_threshold,
            }
            lines.append(f"{user_id}\t{json.dumps(record, sort_keys=True)}")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text("\n".join(lines) + "\n", "utf-8")

    def add_user(
        self,
        user_id: str,
        pin: str,
        delivery_address: dict[str, str] | None = None,
        preferred_format: str = ASCII,
        preferred_threshold: float | None = None,
    ) -> UserProfile:
        if not pin.isdigit():
            raise ValueError("pin must be digits only")
        if preferred_format not in KNOWN_FORMATS:
            raise ValueError(f"unknown preferred format {preferred_format!r}")
        salt = secrets.token_hex(8)
        profile = UserProfile(
            user_id=user_id,
            salt=salt,
            pin_digest=_digest_pin(salt, pin),
            delivery_address=dict(delivery_address or {}),
            preferred_format=preferred_format,
            preferred_threshold=preferred_threshold,
        )
        self._profiles[user_id] = profile
        self.save()
        return profile

    def get(self, user_id: str) -> UserProfile | None:
        return self._profiles.get(user_id)

    def authenticate(self, pin: str) -> UserProfile | None:
        """Find the profile whose PIN matches (the PIN identifies the user)."""
        for profile in self._profiles.values():
            if profile.check_pin(pin):
                return profile
        return None

    def __len__(self) -> int:
        return len(self._profiles)


# ── rendering ──────────────────────────────────────────────────────

Renderer = Callable[[Document], bytes]
_RENDERERS: dict[str, Renderer] = {}


def register_renderer(fmt: str, renderer: Renderer) -> None:
    """Plug in a renderer for a non-ASCII format (pdf, postscript, rdf)."""
    _RENDERERS[fmt] = renderer


def _render_ascii(doc: Document) -> bytes:
    body = " ".join(doc.sentences)
    if not body:
        return f"{doc.title}\n\n".encode("utf-8")
    wrapped = textwrap.fill(body, width=_WRAP_COLUMNS)
    return f"{doc.title}\n\n{wrapped}\n".encode("utf-8")


def render(doc: Document, fmt: str = ASCII) -> bytes:
    """Render a document for delivery.

    ASCII is built in: title line, blank line, sentences joined by spaces
    and wrapped at 72 columns.  Other formats must have been registered.
    """
    if fmt == ASCII:
        return _render_ascii(doc)
    renderer = _RENDERERS.get(fmt)
    if renderer is None:
        raise UnsupportedFormatError(f"no renderer registered for format {fmt!r}")
    return renderer(doc)


# ── delivery ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class DeliveryRequest:
    doc_ids: tuple[str, ...]
    channel: str
    format: str = ASCII

    def __post_init__(self) -> None:
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown delivery channel {self.channel!r}")


@dataclass(frozen=True)
class Receipt:
    receipt_id: str
    channel: str
    target: str
    byte_count: int
    timestamp: float
    status: str  # "delivered" or "failed"
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "receipt_id": self.receipt_id,
            "channel": self.channel,
            "target": self.target,
            "byte_count": self.byte_count,
            "timestamp": self.timestamp,
            "status": self.status,
            "error": self.error,
        }


class DeliveryService:
    """Simulated transports: each channel is an outbox directory."""

    def __init__(self, outbox_root: str | Path) -> None:
        self.outbox_root = Path(outbox_root)
        self.receipts: list[Receipt] = []

    def deliver(self, request: DeliveryRequest, rendered: bytes, profile: UserProfile) -> Receipt:
        """Write the rendered bytes to the channel outbox and issue a receipt.

        The voice channel never reaches this point (the session reads the
        text out); requests for it are rejected here.
        """
        if request.channel == "voice":
            raise ConfigurationError("voice delivery is handled by the session, not the outbox")
        target = profile.delivery_address.get(request.channel)
        if not target:
            raise ConfigurationError(
                f"user {profile.user_id!r} has no {request.channel} address configured"
            )
        receipt_id = uuid.uuid4().hex
        outdir = self.outbox_root / request.channel
        try:
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / f"{receipt_id}.{request.channel}").write_bytes(rendered)
        except OSError as exc:
            receipt = Receipt(
                receipt_id=receipt_id,
                channel=request.channel,
                target=target,
                byte_count=len(rendered),
                timestamp=time.time(),
                status="failed",
                error=str(exc),
            )
            self.receipts.append(receipt)
            return receipt
        receipt = Receipt(
            receipt_id=receipt_id,
            channel=request.channel,
            target=target,
            byte_count=len(rendered),
            timestamp=time.time(),
            status="delivered",
        )
        self.receipts.append(receipt)
        return receipt
