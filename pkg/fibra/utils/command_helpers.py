"""Helpers running library analyses for CLI commands with consistent error handling.

Each ``run_*`` function takes a parsed spec and options and returns a Report;
``execute_command`` wraps them and returns ``(success, report)``. The verdicts
come from the library unchanged: nothing here re-derives a result.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

from fibra.services.algebra import DEFAULT_AUTOMORPHISM_CAP, enumerate_automorphisms
from fibra.services.bundle import DEFAULT_SECTION_CAP, Section
from fibra.services.errors import CapExceeded, FibraError, MissingSection
from fibra.services.exp_shift import (
    exp_shift_section,
    one_parameter_defect,
    sample_grid,
    shift_vector_section,
)
from fibra.services.fibered_algebra import make_fibered_algebra
from fibra.services.holonomy import DEFAULT_GROUP_CAP, HOLONOMIC, classify_holonomic
from fibra.services.representation import (
    coordinates,
    is_effective,
    kernel_of_inefficiency,
    orbit_partition,
    twin_representation,
)
from fibra.utils.reports import ANHOLONOMIC, FAIL, PASS, USAGE_ERROR, Report
from fibra.utils.spec_loader import SpecDocument, parse_spec

logger = logging.getLogger(__name__)

DEFECT_PARAMETERS = (0.1, 0.5, 1.0)


@dataclass(frozen=True)
class CommandOptions:
    """Flags shared by the spec commands, with caps already resolved."""

    base_chart: Optional[str] = None
    reference: Optional[str] = None
    section_cap: int = DEFAULT_SECTION_CAP
    group_cap: int = DEFAULT_GROUP_CAP
    automorphism_cap: int = DEFAULT_AUTOMORPHISM_CAP


def _section_dict(s: Section) -> Dict[str, int]:
    return s.as_dict()


def _sorted_sections(sections) -> list:
    return [_section_dict(s) for s in sorted(sections, key=lambda s: s.values)]


def run_validate(spec: SpecDocument, options: CommandOptions) -> Report:
    """Check every block of the spec: atlas, fibered algebra, group, sections, representation."""
    atlas = spec.build_atlas()
    fiber = spec.build_fiber()
    make_fibered_algebra(atlas, fiber)
    payload = {
        "points": len(atlas.base.points),
        "charts": len(atlas.base.charts),
        "fiber_size": atlas.fiber_size,
        "overlapping_pairs": len(atlas.overlapping_pairs()),
    }
    try:
        payload["automorphisms"] = len(enumerate_automorphisms(fiber, options.automorphism_cap))
    except CapExceeded as e:
        logger.warning(f"Skipping automorphism count: {e.message}")
    if spec.has_group:
        spec.build_fibered_group()
        payload["group_order"] = fiber.size
    payload["sections"] = sorted(spec.build_sections(atlas))
    if spec.representation is not None:
        r = spec.build_representation()
        payload["representation"] = r.variance
    return Report("validate", PASS, {}, payload)


def run_holonomy(spec: SpecDocument, options: CommandOptions) -> Report:
    """Classify the atlas against the fiber algebra without requiring it to validate."""
    report = classify_holonomic(
        spec.build_atlas(), spec.build_fiber(), options.base_chart, options.group_cap
    )
    payload = report.to_dict()
    witnesses: Dict[str, Any] = {"order": report.order, "generators": len(report.generators)}
    witnesses.update(report.witness)
    verdict = HOLONOMIC if report.verdict == HOLONOMIC else ANHOLONOMIC
    return Report("holonomy", verdict, witnesses, payload)


def run_orbits(spec: SpecDocument, options: CommandOptions) -> Report:
    r = spec.build_representation()
    partition = orbit_partition(r, options.section_cap)
    named = {
        name: partition.blocks.index(partition.block_of(s))
        for name, s in spec.build_sections(r.target).items()
    }
    payload = {
        "orbit_count": partition.count,
        "orbit_sizes": partition.sizes,
        "sections": partition.section_count,
        "orbits": [_sorted_sections(block) for block in partition.blocks],
        "named_sections": named,
    }
    return Report("orbits", PASS, {"orbit_count": partition.count}, payload)


def _reference(spec: SpecDocument, options: CommandOptions) -> Tuple[str, Section]:
    name = options.reference
    if name is None:
        names = spec.section_names
        if not names:
            raise MissingSection("Command needs a reference section", {"section": "sections"})
        name = names[0]
    return name, spec.build_section(name)


def run_coords(spec: SpecDocument, options: CommandOptions) -> Report:
    """Coordinates of every named section relative to the reference section."""
    r = spec.build_representation()
    name, v = _reference(spec, options)
    coords = {
        other: _section_dict(coordinates(r, v, w))
        for other, w in spec.build_sections(r.target).items()
    }
    payload = {"reference": name, "coordinates": coords}
    return Report("coords", PASS, {"reference": name}, payload)


def run_twin(spec: SpecDocument, options: CommandOptions) -> Report:
    r = spec.build_representation()
    name, v = _reference(spec, options)
    twin = twin_representation(r, v)
    return Report("twin", PASS, {"reference": name}, {"reference": name, "twin": twin.to_dict()})


def run_kernel(spec: SpecDocument, options: CommandOptions) -> Report:
    r = spec.build_representation()
    kernel = kernel_of_inefficiency(r, options.section_cap)
    effective = is_effective(r, options.section_cap)
    payload = {
        "kernel_size": len(kernel),
        "kernel": _sorted_sections(kernel),
        "effective": effective,
    }
    return Report("kernel", PASS, {"kernel_size": len(kernel), "effective": effective}, payload)


COMMAND_RUNNERS: Dict[str, Callable[[SpecDocument, CommandOptions], Report]] = {
    "validate": run_validate,
    "holonomy": run_holonomy,
    "orbits": run_orbits,
    "coords": run_coords,
    "twin": run_twin,
    "kernel": run_kernel,
}


def error_report(command: str, error: Exception) -> Report:
    """Report for a failed command; usage problems get exit code 2."""
    if isinstance(error, FibraError):
        verdict = USAGE_ERROR if error.usage else FAIL
        return Report(command, verdict, {"error": error.to_dict()}, {})
    return Report(
        command,
        USAGE_ERROR,
        {"error": {"code": "UnexpectedError", "message": str(error), "witness": {}}},
        {},
    )


def load_spec(command: str, path: str) -> Tuple[Optional[SpecDocument], Optional[Report]]:
    """Parse a spec file.

    Returns:
        Tuple of (spec, error_report). If spec is None, error_report explains why.
    """
    try:
        return parse_spec(path), None
    except FibraError as e:
        logger.error(f"Failed to load spec {path}: {e.message}")
        return None, error_report(command, e)
    except Exception as e:
        logger.error(f"Unexpected error loading spec {path}: {str(e)}")
        return None, error_report(command, e)


def execute_command(
    command: str, spec: SpecDocument, options: CommandOptions
) -> Tuple[bool, Report]:
    """Run one spec command with consistent error handling.

    Returns:
        tuple: (success, report)
    """
    runner = COMMAND_RUNNERS[command]
    try:
        report = runner(spec, options)
    except FibraError as e:
        if e.usage:
            logger.error(f"{command}: {e.code}: {e.message}")
        else:
            logger.warning(f"{command}: {e.code}: {e.message}")
        report = error_report(command, e)
    except Exception as e:
        logger.error(f"Unexpected error running {command}: {str(e)}")
        report = error_report(command, e)
    return report.exit_code == 0, report


def run_exp_shift(
    matrix: Sequence[Sequence[float]], samples: int, vector: Sequence[float]
) -> Tuple[bool, Report]:
    """Sample a(t) = exp(tA), shift a vector section by it and measure the one-parameter defect."""
    command = "demo exp-shift"
    try:
        grid = sample_grid(samples)
        shifts = exp_shift_section(matrix, grid)
        shifted = shift_vector_section(matrix, grid, vector)
        defect = max(
            one_parameter_defect(matrix, s, t) for s in DEFECT_PARAMETERS for t in DEFECT_PARAMETERS
        )
    except FibraError as e:
        logger.warning(f"{command}: {e.code}: {e.message}")
        return False, error_report(command, e)
    except Exception as e:
        logger.error(f"Unexpected error running {command}: {str(e)}")
        return False, error_report(command, e)

    payload = {
        "matrix": [list(map(float, row)) for row in matrix],
        "vector": [float(v) for v in vector],
        "samples": [
            {"t": float(t), "a": a.tolist(), "shifted": row.tolist()}
            for t, a, row in zip(grid, shifts, shifted)
        ],
        "max_defect": defect,
    }
    return True, Report(command, PASS, {"max_defect": defect}, payload)
