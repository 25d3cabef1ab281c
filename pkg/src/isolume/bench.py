"""Headless performance harness.

Times each pipeline phase per frame over a fixed scenario: lights orbit
the viewport center one degree per frame while a constant camera step
exercises the texture displacement path between retraces. Work counts
(rays, pixel writes, fragments) are deterministic for a scenario;
wall-clock numbers of course are not.
"""

from __future__ import annotations

import csv
import json
import math
import platform
import statistics
from dataclasses import asdict, dataclass

from . import _kernels
from .assets import atlas_from_env
from .lighting import LightSource, TraceConfig
from .pipeline import FrameRenderer, FrameStats
from .procgen import generate_map
from .shading import ShadeParams

PHASES = ("trace", "correction", "blur", "shade", "total")


@dataclass(frozen=True)
class BenchScenario:
    seed: str = "paper-demo"
    rows: int = 8
    cols: int = 8
    viewport: tuple[int, int] = (1280, 720)
    light_count: int = 2
    light_half_extents: tuple[int, int] = (256, 256)
    skip: int = 2
    update_interval: int = 3
    blur_radius: int = 2
    ambient: float = 0.4
    frames: int = 300
    warmup_frames: int = 10
    camera_step: tuple[int, int] = (1, 0)
    threads: int = 1

    def __post_init__(self):
        if self.frames < 1 or self.warmup_frames < 0:
            raise ValueError("frames must be >= 1 and warmup_frames >= 0")

    @classmethod
    def from_json(cls, text: str) -> "BenchScenario":
        data = json.loads(text)
        for key in ("viewport", "light_half_extents", "camera_step"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    def to_json(self) -> str:
        data = asdict(self)
        for key in ("viewport", "light_half_extents", "camera_step"):
            data[key] = list(data[key])
        return json.dumps(data, indent=2)


@dataclass(frozen=True)
class PhaseStats:
    mean_us: float
    median_us: float
    p95_us: float


@dataclass
class BenchReport:
    scenario: BenchScenario
    backend: str
    phases: dict[str, PhaseStats]
    fps: float
    environment: str
    rays: int = 0
    writes: int = 0
    correction_cells: int = 0
    fragments: int = 0
    traces: int = 0
    displacements: int = 0
    retrace_light_mean_us: float = 0.0
    displaced_light_mean_us: float = 0.0


def _phase_stats(samples: list[float]) -> PhaseStats:
    ordered = sorted(samples)
    idx = max(0, math.ceil(0.95 * len(ordered)) - 1)
    return PhaseStats(
        mean_us=statistics.fmean(samples),
        median_us=statistics.median(samples),
        p95_us=ordered[idx],
    )


def orbit_lights(scenario: BenchScenario, frame: int) -> list[LightSource]:
    """Deterministic circular light path: one degree per frame."""
    vw, vh = scenario.viewport
    cx, cy = vw // 2, vh // 2
    radius = min(vw, vh) // 3
    a, b = scenario.light_half_extents
    lights = []
    for i in range(scenario.light_count):
        angle = math.radians(frame + i * 360.0 / max(scenario.light_count, 1))
        lights.append(
            LightSource(
                cx + int(round(radius * math.cos(angle))),
                cy + int(round(radius * math.sin(angle))),
                a,
                b,
            )
        )
    return lights


def build_renderer(scenario: BenchScenario) -> FrameRenderer:
    scene_map = generate_map(scenario.seed, scenario.rows, scenario.cols)
    return FrameRenderer(
        scene_map,
        atlas=atlas_from_env(),
        viewport=scenario.viewport,
        trace_cfg=TraceConfig(skip=scenario.skip, update_interval=scenario.update_interval),
        shade_params=ShadeParams(scenario.ambient, scenario.blur_radius),
        threads=scenario.threads,
    )


def run_benchmark(scenario: BenchScenario, backend: str | None = None) -> BenchReport:
    """Run the scenario and aggregate per-phase timings into a report."""
    previous = _kernels.get_backend()
    if backend is not None:
        _kernels.set_backend(backend)
    try:
        renderer = build_renderer(scenario)
        for f in range(scenario.warmup_frames):
            renderer.render_frame(orbit_lights(scenario, f), f, camera_delta=scenario.camera_step)
        renderer.lighting.counters.reset()  # warmup work is not reported

        frames: list[FrameStats] = []
        for f in range(scenario.frames):
            _, stats = renderer.render_frame(
                orbit_lights(scenario, f), f, camera_delta=scenario.camera_step
            )
            frames.append(stats)
    finally:
        _kernels.set_backend(previous)

    samples = {
        "trace": [s.trace_us for s in frames],
        "correction": [s.correction_us for s in frames],
        "blur": [s.blur_us for s in frames],
        "shade": [s.shade_us for s in frames],
        "total": [s.total_us for s in frames],
    }
    phases = {name: _phase_stats(vals) for name, vals in samples.items()}
    retrace = [s.light_phase_us for s in frames if s.retraced]
    displaced = [s.light_phase_us for s in frames if not s.retraced]
    counters = renderer.lighting.counters
    return BenchReport(
        scenario=scenario,
        backend=backend or previous,
        phases=phases,
        fps=1e6 / phases["total"].mean_us,
        environment=f"{platform.python_implementation()} {platform.python_version()}, "
        f"{platform.machine()}, {platform.system()}",
        rays=counters.rays,
        writes=counters.writes,
        correction_cells=counters.correction_cells,
        fragments=sum(s.fragments for s in frames),
        traces=counters.traces,
        displacements=counters.displacements,
        retrace_light_mean_us=statistics.fmean(retrace) if retrace else 0.0,
        displaced_light_mean_us=statistics.fmean(displaced) if displaced else 0.0,
    )


def compare_backends(scenario: BenchScenario) -> list[BenchReport]:
    """Run the same scenario once per available kernel backend."""
    return [run_benchmark(scenario, name) for name in _kernels.available_backends()]


_SCENARIO_COLUMNS = (
    "seed", "rows", "cols", "viewport_w", "viewport_h", "light_count",
    "light_a", "light_b", "skip", "update_interval", "blur_radius",
    "ambient", "frames", "warmup_frames", "backend",
)


def _report_row(report: BenchReport) -> dict:
    s = report.scenario
    row = {
        "seed": s.seed, "rows": s.rows, "cols": s.cols,
        "viewport_w": s.viewport[0], "viewport_h": s.viewport[1],
        "light_count": s.light_count,
        "light_a": s.light_half_extents[0], "light_b": s.light_half_extents[1],
        "skip": s.skip, "update_interval": s.update_interval,
        "blur_radius": s.blur_radius, "ambient": s.ambient,
        "frames": s.frames, "warmup_frames": s.warmup_frames,
        "backend": report.backend,
    }
    for phase in PHASES:
        row[f"{phase}_mean_us"] = f"{report.phases[phase].mean_us:.3f}"
    for phase in PHASES:
        row[f"{phase}_p95_us"] = f"{report.phases[phase].p95_us:.3f}"
    row["fps"] = f"{report.fps:.3f}"
    return row


def write_csv(reports, path, append: bool = False) -> None:
    """One header row plus one row per report; append skips the header."""
    if isinstance(reports, BenchReport):
        reports = [reports]
    columns = list(_SCENARIO_COLUMNS)
    columns += [f"{p}_mean_us" for p in PHASES]
    columns += [f"{p}_p95_us" for p in PHASES]
    columns.append("fps")
    mode = "a" if append else "w"
    need_header = True
    if append:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                need_header = fh.readline().strip() == ""
        except FileNotFoundError:
            need_header = True
    with open(path, mode, encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        if need_header:
            writer.writeheader()
        for report in reports:
            writer.writerow(_report_row(report))


def summarize(report: BenchReport) -> str:
    lines = [
        f"backend={report.backend}  fps={report.fps:.1f}  ({report.environment})",
        f"traces={report.traces} displacements={report.displacements} "
        f"rays={report.rays} writes={report.writes}",
    ]
    for phase in PHASES:
        st = report.phases[phase]
        lines.append(
            f"  {phase:<10} mean={st.mean_us:9.1f}us  median={st.median_us:9.1f}us  "
            f"p95={st.p95_us:9.1f}us"
        )
    lines.append(
        f"  light phase: retrace mean={report.retrace_light_mean_us:.1f}us, "
        f"displaced mean={report.displaced_light_mean_us:.1f}us"
    )
    return "\n".join(lines)
