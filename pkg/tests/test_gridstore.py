from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from rational_painleve.boutroux import boutroux_residuals, zero_config
from rational_painleve.elliptic_data import lambda_derivatives
from rational_painleve.genus_zero import boundary_distance, is_in_T
from rational_painleve.gridstore import (
    GridFormatError,
    GridTruncationError,
    GridValidationError,
    OutsideGrid,
    build_grid,
    export_csv,
    interpolate,
    load,
    save,
)

X_E = 1.4430318723300514


@pytest.fixture(scope="module")
def three_rays():
    return build_grid(n_rays=3, n_radial=30, margin=0.02)


def test_ray_zero_stops_near_right_crossing(three_rays):
    last = three_rays.rays[0].nodes[-1]
    assert last.terminal and last.valid
    assert abs(last.x0.imag) < 1e-15
    assert abs(last.x0.real - 1.445) < 0.05
    assert abs(float(boundary_distance(last.x0)[0]) - 0.02) < 1e-6


def test_origin_nodes_match_zero_config(small_grid):
    reference = zero_config()
    for ray in small_grid.rays:
        origin = ray.nodes[0]
        assert origin.k == 0 and origin.x0 == 0
        assert max(abs(a - b) for a, b in zip(origin.config.roots, reference.roots)) < 1e-8
        assert abs(origin.record.H0 + 2 * math.pi * math.sqrt(3)) < 1e-8


def test_nodes_ordered_and_valid(small_grid):
    for ray in small_grid.rays:
        radii = [abs(n.x0) for n in ray.nodes]
        assert radii == sorted(radii)
        assert all(n.valid for n in ray.nodes)
        for node in ray.nodes:
            assert max(abs(r) for r in boutroux_residuals(node.config)) < 1e-10
            assert is_in_T(node.x0) is True


def test_rotation_covariance_between_rays(three_rays):
    first, second = three_rays.rays[0], three_rays.rays[1]
    assert len(first.nodes) == len(second.nodes)
    for a, b in zip(first.nodes, second.nodes):
        assert abs(b.x0 - cmath.exp(2j * math.pi / 3) * a.x0) < 1e-12
        assert abs(abs(a.config.Pi) - abs(b.config.Pi)) < 1e-6


def test_rebuild_is_reproducible(three_rays):
    again = build_grid(n_rays=3, n_radial=30, margin=0.02)
    for a, b in zip(three_rays.nodes(), again.nodes()):
        assert abs(a.config.Pi - b.config.Pi) < 1e-10
        assert abs(a.record.H - b.record.H) < 1e-10
        assert abs(a.dLambda - b.dLambda) < 1e-10


def test_round_trip_is_bit_exact(small_grid, tmp_path):
    path = tmp_path / "grid.jsonl"
    save(small_grid, path)
    loaded = load(path)
    save(loaded, tmp_path / "again.jsonl")
    assert path.read_bytes() == (tmp_path / "again.jsonl").read_bytes()
    for a, b in zip(small_grid.nodes(valid_only=False), loaded.nodes(valid_only=False)):
        assert a.x0 == b.x0 and a.config == b.config
        assert a.record.H == b.record.H and a.record.Lambda == b.record.Lambda
        assert a.dLambda == b.dLambda and a.dbarLambda == b.dbarLambda


def test_corrupted_anchor_is_rejected(small_grid, tmp_path):
    path = tmp_path / "grid.jsonl"
    save(small_grid, path)
    lines = path.read_text().split("\n")
    lines[1] = lines[1].replace('"H0": [-10.882796185', '"H0": [-10.882796285', 1)
    assert lines[1] != path.read_text().split("\n")[1]
    path.write_text("\n".join(lines))
    with pytest.raises(GridValidationError):
        load(path)


def test_truncated_file_is_rejected(small_grid, tmp_path):
    path = tmp_path / "grid.jsonl"
    save(small_grid, path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(GridTruncationError):
        load(path)
    path.write_text("\n".join(text.split("\n")[:-3]) + "\n")
    with pytest.raises(GridTruncationError):
        load(path)


def test_wrong_format_version_is_rejected(small_grid, tmp_path):
    path = tmp_path / "grid.jsonl"
    save(small_grid, path)
    text = path.read_text().replace('"version": 1', '"version": 99', 1)
    path.write_text(text)
    with pytest.raises(GridFormatError):
        load(path)


def test_query_at_node_returns_stored_data(small_grid):
    node = small_grid.rays[2].nodes[3]
    config, record = interpolate(small_grid, node.x0)
    assert config is node.config and record is node.record


def test_query_between_nodes_is_resolved(small_grid):
    a, b = small_grid.rays[1].nodes[3], small_grid.rays[2].nodes[3]
    config, record = interpolate(small_grid, 0.5 * (a.x0 + b.x0))
    assert max(abs(r) for r in boutroux_residuals(config)) <= 1e-11
    assert abs(record.U - 2 * record.c1) < 1e-8 * abs(record.U)


def test_preview_is_close_to_resolved(small_grid):
    a, b = small_grid.rays[1].nodes[3], small_grid.rays[1].nodes[4]
    x0 = 0.5 * (a.x0 + b.x0)
    exact = interpolate(small_grid, x0)[0]
    preview = interpolate(small_grid, x0, preview=True)[0]
    assert abs(exact.Pi - preview.Pi) < 0.05


def test_query_outside_T_is_rejected(small_grid):
    for x0 in (3.0, -3.0, 2j):
        assert is_in_T(x0) is False
        with pytest.raises(OutsideGrid):
            interpolate(small_grid, x0)


def test_polar_derivatives_match_local_differences(full_grid):
    nodes = full_grid.interior_nodes()
    for node in nodes[:: max(1, len(nodes) // 12)]:
        d, dbar = lambda_derivatives(node.config)
        assert abs(node.dLambda - d) < 1e-3
        assert abs(node.dbarLambda - dbar) < 1e-3


def test_csv_export_has_one_row_per_node(small_grid, tmp_path):
    path = tmp_path / "grid.csv"
    export_csv(small_grid, path)
    rows = path.read_text().strip().split("\n")
    assert len(rows) == 1 + len(small_grid.nodes(valid_only=False))


def test_margin_precondition():
    with pytest.raises(ValueError):
        build_grid(n_rays=3, n_radial=5, margin=0.005)
