from __future__ import annotations

import random
from datetime import datetime, timezone

import pytest

from provlab.core.identity import (
    PERM_ID_RE,
    is_perm_id,
    mint_perm_id,
    qr_payload,
    resolve_qr_payload,
)
from provlab.errors import DomainError, ParseError


def test_mint_formats_timestamp_and_sequence():
    clock = datetime(2023, 12, 4, 12, 34, 56, 789000, tzinfo=timezone.utc)
    assert mint_perm_id(clock, 42) == "20231204123456789-42"


def test_mint_epoch_case():
    clock = datetime(1970, 1, 1, tzinfo=timezone.utc)
    assert mint_perm_id(clock, 1) == "19700101000000000-1"


def test_mint_rejects_nonpositive_sequence():
    clock = datetime(2023, 1, 1, tzinfo=timezone.utc)
    with pytest.raises(DomainError):
        mint_perm_id(clock, 0)


def test_minting_is_injective_over_distinct_inputs():
    rng = random.Random(7)
    seen = {}
    for _ in range(500):
        clock = datetime(
            rng.randint(1980, 2030), rng.randint(1, 12), rng.randint(1, 28),
            rng.randint(0, 23), rng.randint(0, 59), rng.randint(0, 59),
            rng.randint(0, 999) * 1000, tzinfo=timezone.utc,
        )
        seq = rng.randint(1, 10_000)
        perm_id = mint_perm_id(clock, seq)
        assert PERM_ID_RE.match(perm_id)
        key = (clock, seq)
        if key in seen:
            assert seen[key] == perm_id
        else:
            assert perm_id not in seen.values()
            seen[key] = perm_id


def test_qr_payload_round_trip():
    perm_id = "20231204123456789-42"
    payload = qr_payload(perm_id)
    assert payload == "rdm://object/20231204123456789-42"
    assert resolve_qr_payload(payload) == perm_id


def test_qr_payload_rejects_foreign_scheme():
    with pytest.raises(ParseError):
        resolve_qr_payload("http://evil")


def test_qr_payload_rejects_bad_perm_id():
    with pytest.raises(ParseError):
        resolve_qr_payload("rdm://object/not-an-id")
    with pytest.raises(ParseError):
        qr_payload("20231204-1")  # timestamp too short


def test_grammar_rejects_leading_zero_sequence():
    assert not is_perm_id("20231204123456789-01")
    assert is_perm_id("20231204123456789-10")
