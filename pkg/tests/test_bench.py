import csv
import json

import numpy as np
import pytest

from isolume.bench import (
    BenchScenario,
    orbit_lights,
    run_benchmark,
    write_csv,
)

SMALL = BenchScenario(
    seed="bench-test",
    rows=3,
    cols=3,
    viewport=(160, 120),
    light_count=1,
    light_half_extents=(48, 48),
    frames=7,
    warmup_frames=1,
)


def test_zero_lights_report_well_formed():
    scenario = BenchScenario(
        seed="empty", rows=2, cols=2, viewport=(96, 64), light_count=0,
        frames=1, warmup_frames=0,
    )
    report = run_benchmark(scenario)
    assert report.rays == 0 and report.writes == 0
    assert report.phases["total"].mean_us >= report.phases["shade"].mean_us
    assert report.fps > 0


def test_work_counts_deterministic():
    r1 = run_benchmark(SMALL)
    r2 = run_benchmark(SMALL)
    assert (r1.rays, r1.writes, r1.correction_cells, r1.fragments) == (
        r2.rays,
        r2.writes,
        r2.correction_cells,
        r2.fragments,
    )
    assert r1.traces == r2.traces and r1.displacements == r2.displacements


def test_ray_count_linear_in_light_count():
    counts = []
    for k in (1, 2, 3):
        scenario = BenchScenario(
            seed="lin", rows=2, cols=2, viewport=(200, 160), light_count=k,
            light_half_extents=(20, 20), frames=3, warmup_frames=0, camera_step=(0, 0),
        )
        counts.append(run_benchmark(scenario).rays)
    assert counts[1] == 2 * counts[0]
    assert counts[2] == 3 * counts[0]


def test_pixel_writes_double_for_disjoint_lights(empty_obstacles):
    # two congruent lights over an empty obstacle map write exactly twice
    # the pixels of one
    from isolume.lighting import LightSource, TraceConfig, render_light, LightTexture

    cfg = TraceConfig(skip=2)
    obstacles = empty_obstacles(400, 300)

    def writes(lights):
        tex = LightTexture(np.zeros((300, 400), np.uint8), margin=0)
        total = 0
        for light in lights:
            _, w, _ = render_light(tex, light, obstacles, cfg)
            total += w
        return total

    one = writes([LightSource(100, 150, 40, 40)])
    two = writes([LightSource(100, 150, 40, 40), LightSource(290, 150, 40, 40)])
    assert two == 2 * one


def test_scenario_json_round_trip():
    text = SMALL.to_json()
    again = BenchScenario.from_json(text)
    assert again == SMALL
    data = json.loads(text)
    assert data["viewport"] == [160, 120]


def test_csv_shape_and_fps_consistency(tmp_path):
    report = run_benchmark(SMALL)
    path = tmp_path / "bench.csv"
    write_csv(report, path)
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 1
    row = rows[0]
    assert row["seed"] == "bench-test"
    fps = float(row["fps"])
    mean_total = float(row["total_mean_us"])
    assert fps == pytest.approx(1e6 / mean_total, rel=1e-3)


def test_csv_append_skips_header(tmp_path):
    report = run_benchmark(SMALL)
    path = tmp_path / "bench.csv"
    write_csv(report, path)
    write_csv(report, path, append=True)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 3  # one header + two data rows
    assert lines[0].startswith("seed,")
    assert not lines[2].startswith("seed,")


def test_orbit_is_deterministic_and_moves():
    a = orbit_lights(SMALL, 5)
    b = orbit_lights(SMALL, 5)
    assert [(l.x, l.y) for l in a] == [(l.x, l.y) for l in b]
    c = orbit_lights(SMALL, 96)
    assert [(l.x, l.y) for l in a] != [(l.x, l.y) for l in c]


def test_cadence_counts_match_interval():
    report = run_benchmark(SMALL)
    expected_traces = sum(
        1 for f in range(SMALL.frames) if f % SMALL.update_interval == 0
    )
    assert report.traces == expected_traces
    assert report.displacements == SMALL.frames - expected_traces
