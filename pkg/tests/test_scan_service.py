"""Tests for app/services/scan_service.py: grid scans of curvature and radii."""

from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from app.exceptions import InvalidArgumentError
from app.services import scan_service
from app.services.graph_surface import GraphSurfaceSpec
from utils import jets

T = Fraction(1, 12)


class TestCurvatureScan:
    def test_base_graph_negative(self):
        report = scan_service.curvature_scan(0, 32, 1e-3)
        assert report.samples > 0
        assert report.max_value < 0.0
        assert report.violation_count == 0
        assert report.violations == []

    def test_counterexample_negative(self):
        report = scan_service.curvature_scan(T, 48, 1e-3)
        assert report.violation_count == 0
        assert report.max_value < 0.0
        assert report.sign_mismatches == 0

    def test_both_sheets(self):
        report = scan_service.curvature_scan(T, 16, 1e-3)
        table = report.table
        assert set(table['sheet']) == {1, -1}
        assert (table['sheet'] == 1).sum() == (table['sheet'] == -1).sum() == report.samples // 2
        assert list(table.columns) == scan_service.SCAN_COLUMNS
        assert (table['boundary_distance'] >= 1e-3).all()

    def test_independent_of_workers(self):
        serial = scan_service.curvature_scan(T, 24, 1e-3, n_jobs=1)
        threaded = scan_service.curvature_scan(T, 24, 1e-3, n_jobs=3)
        pd.testing.assert_frame_equal(serial.table, threaded.table)

    def test_violations_recorded(self):
        # a bowl has K > 0 everywhere
        bowl = GraphSurfaceSpec.custom(lambda x, y: x ** 2 + y ** 2, lambda x, y: 1.0 - x ** 2 - y ** 2)
        table = scan_service.scan_table([bowl], 16, 1e-3, n_jobs=1)
        assert (table['K'] > 0).all()

    @pytest.mark.parametrize("n, margin", [(8, 1e-3), (32, 0.0), (32, 1.0)])
    def test_invalid_parameters(self, n, margin):
        with pytest.raises(InvalidArgumentError):
            scan_service.curvature_scan(T, n, margin)


class TestRadiiScan:
    def test_counterexample(self):
        report = scan_service.shape_radii_scan(T, 32, 1e-3)
        assert report.quantity == 'radii'
        assert report.violation_count == 0
        assert report.max_value < 0.0
        assert report.min_r1 < 0.0 < report.min_r2

    def test_custom_sphere(self):
        sphere = GraphSurfaceSpec.custom(lambda x, y: jets.sqrt(1.0 - x ** 2 - y ** 2),
                                         lambda x, y: 0.8 - x ** 2 - y ** 2, name="sphere")
        report = scan_service.shape_radii_scan(None, 16, 1e-3, spec=sphere)
        assert report.surface == 'custom'
        np.testing.assert_allclose(report.table['r1'], -1.0, atol=1e-8)
        np.testing.assert_allclose(report.table['r2'], -1.0, atol=1e-8)
        # umbilic and elliptic: every sample is flagged
        assert report.violation_count == report.samples
        assert len(report.violations) == min(report.samples, 100)


class TestTInterval:
    def test_small_t_negative(self):
        result = scan_service.t_interval_scan([0.0, 1 / 12], n=24)
        assert [entry.t for entry in result.entries] == [0.0, 1 / 12]
        assert result.negative_ts == [0.0, 1 / 12]
        assert result.lower == 0.0 and result.upper == pytest.approx(1 / 12)

    def test_empty(self):
        with pytest.raises(InvalidArgumentError):
            scan_service.t_interval_scan([])
