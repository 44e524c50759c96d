import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gantry.errors import PreconditionError
from gantry.storage import (
    CONN_CONNECTED,
    CONN_STANDALONE,
    DISK_UP_TO_DATE,
    ROLE_PRIMARY,
    ROLE_SECONDARY,
    StorageState,
    meta_size,
)

N1, N2 = "n1", "n2"


def make_pair(store=None, size=4096, rate=11.5):
    store = store or StorageState()
    store.create_volume_group(N1, "ganeti", 141179)
    store.create_volume_group(N2, "ganeti", 141179)
    pair = store.create_pair("d-1", N1, N2, size, port=11002, minors={N1: 0, N2: 0}, sync_rate=rate)
    return store, pair


# -- volume groups ----------------------------------------------------------

def test_create_volume_group_and_vgs_row():
    store = StorageState()
    store.create_volume_group(N1, "ganeti", 141179)
    row = store.vgs_row(N1, "ganeti")
    assert row["VSize"] == "137.87g"
    assert row["VFree"] == "137.87g"
    assert row["VG"] == "ganeti"


def test_duplicate_vg_rejected():
    store = StorageState()
    store.create_volume_group(N1, "ganeti", 1000)
    with pytest.raises(PreconditionError) as err:
        store.create_volume_group(N1, "ganeti", 1000)
    assert err.value.code == "duplicate-vg"


def test_free_space_tracks_carved_volumes():
    store = StorageState()
    store.create_volume_group(N1, "ganeti", 141179)
    store.carve_lv(N1, "ganeti", "a.disk_data", 4096, "data", "u1")
    store.carve_lv(N1, "ganeti", "a.disk_meta", 320, "meta", "u2")
    assert store.vg_free(N1, "ganeti") == 141179 - 4416


def test_carve_rejects_oversize():
    store = StorageState()
    store.create_volume_group(N1, "ganeti", 1000)
    with pytest.raises(PreconditionError) as err:
        store.carve_lv(N1, "ganeti", "big.disk_data", 1001, "data", "u1")
    assert err.value.code == "insufficient-space"
    assert N1 in err.value.message


# -- metadata sizing ----------------------------------------------------------

def test_meta_size_known_points():
    assert meta_size(4096) == 320
    assert meta_size(8192) == 512


@given(st.integers(min_value=1, max_value=10**6))
def test_meta_size_matches_ceiling_rule(mib):
    assert meta_size(mib) == 128 + 48 * math.ceil(mib / 1024)


# -- replication state machine ------------------------------------------------

def test_new_pair_starts_syncing():
    _, pair = make_pair()
    assert pair.sync_percent == 0.0
    assert pair.syncing()
    assert pair.side(N1).role == ROLE_PRIMARY
    assert pair.side(N2).role == ROLE_SECONDARY


def test_resync_tick_matches_rate_arithmetic():
    store, pair = make_pair(size=4096, rate=11.5)
    progress = store.resync_tick("d-1", 60)
    assert progress.percent == pytest.approx(100 * (11.5 * 60) / 4096)
    assert progress.text.endswith("remaining (estimated)")


def test_resync_is_monotonic_and_terminates_at_exactly_100():
    store, pair = make_pair(size=1024, rate=11.5)
    last = 0.0
    while pair.sync_percent < 100.0:
        progress = store.resync_tick("d-1", 13)
        assert progress.percent >= last
        last = progress.percent
    assert pair.sync_percent == 100.0
    assert pair.up_to_date()
    assert not pair.syncing()


def test_resync_report_format():
    store, pair = make_pair(size=4096, rate=11.5)
    progress = store.resync_tick("d-1", 3.2)
    # e.g. "0.90% done, 4m 16s remaining (estimated)"
    import re

    assert re.match(r"^\d+\.\d\d% done, (\d+m )?\d+s remaining \(estimated\)$", progress.text)


def test_resync_tick_requires_syncing_pair():
    store, pair = make_pair(size=1024)
    store.resync_tick("d-1", 10**6)  # completes
    with pytest.raises(PreconditionError) as err:
        store.resync_tick("d-1", 1)
    assert err.value.code == "not-syncing"


def finish_sync(store, uuid="d-1"):
    store.resync_tick(uuid, 10**9)


def test_migration_transition_sequence_is_legal():
    store, pair = make_pair()
    finish_sync(store)
    store.set_mode("d-1", "secondary", node=N2)
    store.set_mode("d-1", "standalone")
    store.set_mode("d-1", "connected")
    store.set_mode("d-1", "dual_primary")
    assert pair.primaries() == {N1, N2}
    store.set_mode("d-1", "secondary", node=N1)
    store.set_mode("d-1", "standalone")
    store.set_mode("d-1", "connected")
    store.set_mode("d-1", "single_primary", node=N2)
    assert pair.side(N2).role == ROLE_PRIMARY
    assert pair.side(N1).role == ROLE_SECONDARY


def test_dual_primary_from_standalone_is_illegal():
    store, pair = make_pair()
    finish_sync(store)
    store.set_mode("d-1", "standalone")
    with pytest.raises(PreconditionError) as err:
        store.set_mode("d-1", "dual_primary")
    assert err.value.code == "illegal-transition"
    assert "standalone" in err.value.message


def test_single_primary_requires_connection():
    store, pair = make_pair()
    finish_sync(store)
    store.set_mode("d-1", "standalone")
    with pytest.raises(PreconditionError):
        store.set_mode("d-1", "single_primary", node=N2)


def test_connected_standalone_round_trip():
    store, pair = make_pair()
    store.set_mode("d-1", "standalone")
    assert all(s.conn == CONN_STANDALONE for s in pair.sides.values())
    store.set_mode("d-1", "connected")
    assert all(s.conn == CONN_CONNECTED for s in pair.sides.values())


def test_up_to_date_iff_sync_complete():
    store, pair = make_pair(size=1024)
    store.resync_tick("d-1", 10)
    assert not pair.up_to_date()
    finish_sync(store)
    assert pair.up_to_date()
    assert all(s.disk == DISK_UP_TO_DATE for s in pair.sides.values())


# -- orphans -------------------------------------------------------------------

def test_orphan_volumes_detected_by_reference_scan():
    store = StorageState()
    store.create_volume_group(N1, "ganeti", 141179)
    store.carve_lv(N1, "ganeti", "known.disk_data", 100, "data", "u1")
    store.carve_lv(N1, "ganeti", "stray.disk_data", 100, "data", "u2")
    orphans = store.orphan_volumes({"known.disk_data"})
    assert orphans == [(N1, "ganeti", "stray.disk_data")]
