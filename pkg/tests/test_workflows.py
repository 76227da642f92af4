from __future__ import annotations

import math
import random

import numpy as np
import pytest

from provlab.core.repository import Repository
from provlab.errors import DomainError, EmptyInputError, SyntaxFormatError
from provlab.extract.fixtures import make_geometry_csv, make_load_csv
from provlab.store import BlobStore, register_linked_dataset
from provlab.workflows import (
    LoadDisplacementSeries,
    PillarGeometry,
    parse_geometry_csv,
    parse_load_csv,
    prep_report,
    render_curve,
    render_report_html,
    render_report_text,
    run_stress_strain,
    scheduler_tick,
    stress_strain,
)


def brute_force_stress_strain(series, geometry):
    """Independent per-point evaluation used as the oracle."""
    points = []
    for i in range(len(series.time_s)):
        stress = 4.0 * float(series.load_n[i]) / (math.pi * geometry.diameter_top_m ** 2)
        strain = float(series.displacement_m[i]) / geometry.height_m
        points.append((strain, stress))
    return points


def series_from(us, fs):
    n = len(us)
    return LoadDisplacementSeries(
        np.arange(1.0, n + 1.0), np.asarray(us, dtype=float), np.asarray(fs, dtype=float)
    )


GEOMETRY = PillarGeometry("MP1", diameter_top_m=1.0e-6, height_m=2.0e-6)


def test_hand_derived_stress_fixture():
    curve = stress_strain(series_from([5.0e-8], [1.0e-3]), GEOMETRY)
    assert curve.stress_pa[0] == pytest.approx(1.2732395e9, rel=1e-6)
    assert curve.strain[0] == pytest.approx(0.025, rel=1e-12)


def test_zero_maps_to_zero():
    curve = stress_strain(series_from([0.0], [0.0]), GEOMETRY)
    assert (curve.strain[0], curve.stress_pa[0]) == (0.0, 0.0)


def test_matches_brute_force_oracle_on_random_series():
    rng = random.Random(8)
    for _ in range(100):
        n = rng.randint(1, 60)
        us = [rng.uniform(0, 1e-6) for _ in range(n)]
        fs = [rng.uniform(0, 1e-2) for _ in range(n)]
        geometry = PillarGeometry(
            "P", rng.uniform(2e-7, 5e-6), rng.uniform(5e-7, 1e-5)
        )
        curve = stress_strain(series_from(us, fs), geometry)
        for i, (strain, stress) in enumerate(brute_force_stress_strain(series_from(us, fs), geometry)):
            assert curve.strain[i] == pytest.approx(strain, rel=1e-12)
            assert curve.stress_pa[i] == pytest.approx(stress, rel=1e-12)


def test_linearity_in_load_diameter_and_height():
    # power-of-two factors commute exactly with float rounding, so these
    # scalings must hold bitwise; a general factor holds to 1 ulp
    rng = random.Random(9)
    us = [rng.uniform(0, 1e-6) for _ in range(20)]
    fs = [rng.uniform(0, 1e-2) for _ in range(20)]
    base = stress_strain(series_from(us, fs), GEOMETRY)

    doubled_load = stress_strain(series_from(us, [2.0 * f for f in fs]), GEOMETRY)
    assert np.all(doubled_load.stress_pa == 2.0 * base.stress_pa)

    tripled_load = stress_strain(series_from(us, [3.0 * f for f in fs]), GEOMETRY)
    assert np.allclose(tripled_load.stress_pa, 3.0 * base.stress_pa, rtol=1e-15)

    doubled_d = stress_strain(
        series_from(us, fs),
        PillarGeometry("MP1", 2.0 * GEOMETRY.diameter_top_m, GEOMETRY.height_m),
    )
    assert np.all(doubled_d.stress_pa == base.stress_pa / 4.0)

    doubled_h = stress_strain(
        series_from(us, fs),
        PillarGeometry("MP1", GEOMETRY.diameter_top_m, 2.0 * GEOMETRY.height_m),
    )
    assert np.all(doubled_h.strain == base.strain / 2.0)


def test_nonpositive_geometry_rejected():
    with pytest.raises(DomainError):
        stress_strain(series_from([1e-8], [1e-3]), PillarGeometry("P", 0.0, 1e-6))
    with pytest.raises(DomainError):
        stress_strain(series_from([1e-8], [1e-3]), PillarGeometry("P", 1e-6, -1e-6))


def test_empty_series_rejected():
    with pytest.raises(EmptyInputError):
        stress_strain(series_from([], []), GEOMETRY)


def test_no_reordering_or_smoothing():
    us = [3e-8, 1e-8, 2e-8]
    fs = [3e-3, 1e-3, 2e-3]
    curve = stress_strain(series_from(us, fs), GEOMETRY)
    assert list(curve.strain) == [u / GEOMETRY.height_m for u in us]


# -- CSV ingestion ------------------------------------------------------------


def test_load_csv_converts_units_immediately():
    series = parse_load_csv("time_s,displacement_nm,load_mN\n0.0,50.0,1.0\n0.1,60.0,1.2\n")
    assert series.displacement_m[0] == 50.0 * 1e-9
    assert series.load_n[0] == 1.0 * 1e-3
    assert len(series) == 2


def test_load_csv_header_must_match_exactly():
    with pytest.raises(SyntaxFormatError):
        parse_load_csv("time,displacement,load\n0,0,0\n")


def test_load_csv_time_must_increase():
    with pytest.raises(DomainError):
        parse_load_csv("time_s,displacement_nm,load_mN\n0.1,1,1\n0.1,2,2\n")


def test_geometry_csv_parses_micrometres():
    pillars = parse_geometry_csv("pillar_id,diameter_top_um,height_um\nMP1,1.0,2.0\n")
    assert pillars == [PillarGeometry("MP1", 1.0e-6, 2.0e-6)]


def test_fixture_csvs_parse():
    assert len(parse_load_csv(make_load_csv())) == 200
    assert [p.pillar_id for p in parse_geometry_csv(make_geometry_csv())] == ["MP1", "MP2"]


# -- figure rendering -----------------------------------------------------------


def test_render_curve_is_png_and_deterministic():
    curve = stress_strain(series_from([0.0, 5e-8], [0.0, 1e-3]), GEOMETRY)
    png1 = render_curve(curve)
    png2 = render_curve(curve)
    assert png1.startswith(b"\x89PNG\r\n\x1a\n")
    assert png1 == png2


def test_render_empty_curve_rejected():
    empty = stress_strain(series_from([0.0], [0.0]), GEOMETRY)
    import dataclasses

    hollow = dataclasses.replace(empty, strain=np.array([]), stress_pa=np.array([]))
    with pytest.raises(EmptyInputError):
        render_curve(hollow)


# -- preparation report ------------------------------------------------------------


def entry_with_steps(repo, order=(1, 2, 3)):
    entry = repo.create_object("ENTRY", {"name": "metallography", "technique": "METALLOGRAPHY"})
    materials = {1: ("SiC P800", "water"), 2: ("diamond 3um", "ethanol"), 3: ("OPS", "none")}
    for index in order:
        abrasive, lubricant = materials[index]
        repo.create_object(
            "PREPARATION_STEP",
            {
                "sequence_index": index,
                "protocol_name": f"step-{index}",
                "abrasive": abrasive,
                "lubricant": lubricant,
                "duration_s": 60.0 * index,
            },
            parents=(entry.perm_id,),
        )
    return entry.perm_id


def test_report_rows_in_sequence_order():
    repo = Repository()
    entry = entry_with_steps(repo)
    table = prep_report(repo, entry)
    assert table.columns == ("Step", "Protocol", "Abrasive", "Lubricant", "Duration")
    assert [row[0] for row in table.rows] == ["1", "2", "3"]
    assert table.rows[0][2] == "SiC P800"
    assert table.rows[2][4] == "180 s"


def test_report_sorts_out_of_order_registration():
    repo = Repository()
    entry = entry_with_steps(repo, order=(3, 1, 2))
    table = prep_report(repo, entry)
    assert [row[0] for row in table.rows] == ["1", "2", "3"]


def test_report_with_no_steps_is_header_only():
    repo = Repository()
    entry = repo.create_object("ENTRY", {"name": "empty"}).perm_id
    table = prep_report(repo, entry)
    assert table.rows == ()
    assert "Step" in render_report_text(table)


def test_report_renderings_contain_every_step_once():
    repo = Repository()
    entry = entry_with_steps(repo)
    table = prep_report(repo, entry)
    text = render_report_text(table)
    html = render_report_html(table)
    for name in ("step-1", "step-2", "step-3"):
        assert text.count(name) == 1
        assert html.count(f"<td>{name}</td>") == 1


# -- scheduler -----------------------------------------------------------------------


def micro_mech_entry(repo, store, *, geometry=True, load=True, pillars=("MP1", "MP2")):
    props = {"name": "pillar tests", "technique": "MICROPILLAR_COMPRESSION"}
    if geometry:
        props["pillar_geometry"] = make_geometry_csv({p: (1.0 + i, 2.0 + i) for i, p in enumerate(pillars)})
    entry = repo.create_object("MICRO_MECH_EXP", props).perm_id
    if load:
        for i, pillar in enumerate(pillars):
            register_linked_dataset(
                repo, store, entry,
                make_load_csv(pillar=pillar, seed=i).encode("utf-8"),
                "LOAD_DISPLACEMENT",
                original_filename=f"{pillar}_load.csv",
            )
    return entry


def test_first_tick_executes_second_tick_skips(tmp_path):
    repo = Repository()
    store = BlobStore(tmp_path / "blobs")
    entry = micro_mech_entry(repo, store)
    prep_entry = entry_with_steps(repo)

    outcomes = scheduler_tick(repo, store)
    executed = [o for o in outcomes if not o.skipped]
    assert len(executed) == 2
    by_entry = {(o.entry, o.workflow_name): o for o in outcomes}
    assert len(by_entry[(entry, "stress-strain")].produced_datasets) == 2  # MP1 and MP2
    assert len(by_entry[(prep_entry, "prep-report")].produced_datasets) == 2  # html + txt

    second = scheduler_tick(repo, store)
    assert all(o.skipped for o in second)
    assert sum(len(o.produced_datasets) for o in second) == 0


def test_two_pillars_give_two_separate_figures(tmp_path):
    repo = Repository()
    store = BlobStore(tmp_path / "blobs")
    entry = micro_mech_entry(repo, store)
    outcome = run_stress_strain(repo, store, entry)
    names = sorted(
        repo.get_dataset(d).original_filename for d in outcome.produced_datasets
    )
    assert names == ["stress_strain_MP1.png", "stress_strain_MP2.png"]
    for dataset_id in outcome.produced_datasets:
        record = repo.get_dataset(dataset_id)
        assert record.owner_entry == entry
        assert store.get_blob(record.blob).startswith(b"\x89PNG")


def test_geometry_without_load_is_skipped_with_reason(tmp_path):
    repo = Repository()
    store = BlobStore(tmp_path / "blobs")
    entry = micro_mech_entry(repo, store, load=False)
    outcome = run_stress_strain(repo, store, entry)
    assert outcome.skipped
    assert outcome.reason == "missing input"
    assert outcome.produced_datasets == ()


def test_load_without_geometry_is_skipped(tmp_path):
    repo = Repository()
    store = BlobStore(tmp_path / "blobs")
    entry = micro_mech_entry(repo, store, geometry=False)
    outcome = run_stress_strain(repo, store, entry)
    assert outcome.skipped and outcome.reason == "missing input"


def test_new_upload_retriggers_analysis(tmp_path):
    repo = Repository()
    store = BlobStore(tmp_path / "blobs")
    entry = micro_mech_entry(repo, store, pillars=("MP1",))
    first = run_stress_strain(repo, store, entry)
    assert not first.skipped
    assert run_stress_strain(repo, store, entry).skipped

    register_linked_dataset(
        repo, store, entry, make_load_csv(pillar="MP2", seed=42).encode("utf-8"),
        "LOAD_DISPLACEMENT", original_filename="MP2_run.csv",
    )
    # fingerprint changed, but MP2 is not in the geometry sheet: still runs,
    # producing figures only for matched pillars
    rerun = run_stress_strain(repo, store, entry)
    assert not rerun.skipped


def test_one_failure_does_not_abort_the_tick(tmp_path):
    repo = Repository()
    store = BlobStore(tmp_path / "blobs")
    bad_entry = repo.create_object(
        "MICRO_MECH_EXP",
        {"name": "broken", "pillar_geometry": "pillar_id,diameter_top_um,height_um\nMP1,0.0,2.0\n"},
    ).perm_id
    register_linked_dataset(
        repo, store, bad_entry, make_load_csv(pillar="MP1").encode("utf-8"),
        "LOAD_DISPLACEMENT", original_filename="MP1.csv",
    )
    good_entry = micro_mech_entry(repo, store, pillars=("MP1",))
    outcomes = scheduler_tick(repo, store)
    by_entry = {o.entry: o for o in outcomes}
    assert by_entry[bad_entry].skipped and "failed" in by_entry[bad_entry].reason
    assert not by_entry[good_entry].skipped


def test_randomized_repositories_tick_twice_is_silent(tmp_path):
    rng = random.Random(13)
    for trial in range(5):
        repo = Repository()
        store = BlobStore(tmp_path / f"blobs{trial}")
        for i in range(rng.randint(0, 3)):
            micro_mech_entry(repo, store,
                             geometry=rng.random() < 0.8,
                             load=rng.random() < 0.8,
                             pillars=("MP1",))
        if rng.random() < 0.5:
            entry_with_steps(repo)
        scheduler_tick(repo, store)
        second = scheduler_tick(repo, store)
        assert sum(len(o.produced_datasets) for o in second) == 0
