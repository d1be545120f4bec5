"""Privacy layer: hashed identities, per-epoch ephemeral tokens, and the
server-side token resolution table.

Only two things ever leave a device: the 32-byte identity digest and 16-byte
rotating tokens. The raw enterprise ID and the device secret never appear in
any record.
"""
from __future__ import annotations

import hashlib
import hmac
import secrets as _secrets
import time
from dataclasses import dataclass, field

from .errors import InvalidConfig, InvalidIdentity

ROTATION_MS_DEFAULT = 900_000  # 15 min
SKEW_EPOCHS_DEFAULT = 1
TOKEN_LEN = 16

MS_PER_DAY = 86_400_000


@dataclass(frozen=True)
class AssociateIdentity:
    associate_hash: str  # 64 hex chars
    display_alias: str
    enrolled_at: int  # epoch-ms


@dataclass(frozen=True)
class DeviceSecret:
    """Per-device HMAC key. Never serialized into event records."""

    secret: bytes
    owner: str  # associate_hash
    issued_epoch_day: int

    def __repr__(self) -> str:  # keep key material out of logs
        return f"DeviceSecret(owner={self.owner[:8]}…, issued_epoch_day={self.issued_epoch_day})"


@dataclass(frozen=True)
class EphemeralToken:
    token: bytes
    epoch_index: int

    @property
    def hex(self) -> str:
        return self.token.hex()


def hash_identity(
    enterprise_id: str,
    org_salt: bytes,
    display_alias: str | None = None,
    enrolled_at_ms: int | None = None,
) -> AssociateIdentity:
    """Hash an enterprise ID into its on-air identity: SHA-256(salt || id)."""
    if not enterprise_id:
        raise InvalidIdentity("enterprise_id must be non-empty")
    digest = hashlib.sha256(org_salt + enterprise_id.encode("utf-8")).hexdigest()
    if enrolled_at_ms is None:
        enrolled_at_ms = int(time.time() * 1000)
    return AssociateIdentity(
        associate_hash=digest,
        display_alias=display_alias if display_alias is not None else digest[:8],
        enrolled_at=enrolled_at_ms,
    )


def new_device_secret(owner: str, now_ms: int | None = None) -> DeviceSecret:
    if now_ms is None:
        now_ms = int(time.time() * 1000)
    return DeviceSecret(
        secret=_secrets.token_bytes(32), owner=owner, issued_epoch_day=now_ms // MS_PER_DAY
    )


def epoch_of(timestamp_ms: int, rotation_ms: int = ROTATION_MS_DEFAULT) -> int:
    """Epoch index of a timestamp; epoch 0 starts at timestamp 0 UTC."""
    if rotation_ms <= 0:
        raise InvalidConfig(f"rotation_ms must be > 0, got {rotation_ms}")
    return timestamp_ms // rotation_ms

def derive_token(secret: DeviceSecret, epoch_index: int) -> EphemeralToken:
    """Token for one epoch: first 16 bytes of HMAC-SHA256(secret, epoch as be64)."""
    msg = epoch_index.to_bytes(8, "big", signed=True)
    mac = hmac.new(secret.secret, msg, hashlib.sha256).digest()
    return EphemeralToken(token=mac[:TOKEN_LEN], epoch_index=epoch_index)


class TokenResolver:
    """Server-side token-to-owner resolution.

    Per-epoch lookup tables are built once on first use and swapped in whole,
    so concurrent readers always see a complete table; a resolution is a
    handful of dict probes (one per epoch in the skew window).
    """

    def __init__(self, roster: list[DeviceSecret], skew_epochs: int = SKEW_EPOCHS_DEFAULT):
        if skew_epochs < 0:
            raise InvalidConfig("skew_epochs must be >= 0")
        self._roster = list(roster)
        self._skew = skew_epochs
        self._tables: dict[int, dict[bytes, str]] = {}

    def _table_for(self, epoch: int) -> dict[bytes, str]:
        table = self._tables.get(epoch)
        if table is None:
            table = {derive_token(s, epoch).token: s.owner for s in self._roster}
            self._tables[epoch] = table
        return table

    def resolve(self, token: EphemeralToken | bytes, observed_epoch: int) -> str | None:
        raw = token.token if isinstance(token, EphemeralToken) else token
        for epoch in range(observed_epoch - self._skew, observed_epoch + self._skew + 1):
            owner = self._table_for(epoch).get(raw)
            if owner is not None:
                return owner
        return None


def resolve_token(
    token: EphemeralToken | bytes,
    observed_epoch: int,
    roster: list[DeviceSecret],
    skew_epochs: int = SKEW_EPOCHS_DEFAULT,
) -> str | None:
    """One-shot resolution; build a TokenResolver for repeated lookups."""
    return TokenResolver(roster, skew_epochs).resolve(token, observed_epoch)
