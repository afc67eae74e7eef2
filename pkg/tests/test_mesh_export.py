"""Tests for app/services/mesh_generation.py and app/services/report_export.py."""

from fractions import Fraction

import numpy as np
import numpy.testing as npt
import pandas as pd
import pytest

from app.exceptions import InvalidArgumentError
from app.services import mesh_generation as mg
from app.services.certify import CurvNumerator, certify_sign
from app.services.graph_surface import base_g, boundary_distance
from app.services.report_export import export_report, read_obj_vertices, read_scan_csv, write_obj, write_scan_csv
from app.services.scan_service import curvature_scan
from utils.json_utils import read_json, write_json
from utils.pydantic_schema import IntervalBox, SignCertificate


class TestMeshes:
    def test_boundary_radius(self):
        assert mg.domain_boundary_radius(0.0) == pytest.approx(1.0)
        alpha = np.linspace(0.0, 2 * np.pi, 50)
        r = mg.domain_boundary_radius(alpha)
        npt.assert_allclose(boundary_distance(r * np.cos(alpha), r * np.sin(alpha)), 0.0, atol=1e-14)

    def test_mm_mesh(self):
        n = 16
        mesh = mg.mm_mesh(Fraction(1, 12), n)
        assert mesh.vertices.shape == (2 * (n * n + 1), 3)
        assert np.all(np.isfinite(mesh.vertices))
        assert mesh.faces.min() >= 0 and mesh.faces.max() < len(mesh.vertices)
        npt.assert_allclose(np.linalg.norm(mesh.normals, axis=1), 1.0, atol=1e-12)
        upper, lower = np.split(mesh.vertices, 2)
        # the sheets meet along the boundary ring
        npt.assert_allclose(upper[-n:, 2], lower[-n:, 2], atol=1e-7)
        assert mesh.normals[0, 2] > 0.0 > mesh.normals[n * n + 1, 2]

    def test_basegraph_mesh(self):
        mesh = mg.basegraph_mesh(8)
        npt.assert_allclose(mesh.vertices[:, 2], base_g(mesh.vertices[:, 0], mesh.vertices[:, 1]))

    def test_crosscap_mesh(self):
        mesh = mg.crosscap_mesh(9)
        assert mesh.vertices.shape == (81, 3)
        assert len(mesh.faces) == 2 * 8 * 8
        x, y, z = mesh.vertices.T
        residual = np.abs(x ** 4 * y ** 5 - (x ** 4 + y ** 2 * z ** 2) ** 2) / np.maximum(1.0, np.abs(x ** 4 * y ** 5))
        assert residual.max() <= 1e-9

    @pytest.mark.parametrize("surface, n", [("torus", 8), ("mm", 2)])
    def test_invalid(self, surface, n):
        with pytest.raises(InvalidArgumentError):
            mg.build_mesh(surface, Fraction(1, 12), n)


class TestExport:
    def test_obj_roundtrip(self, tmp_path):
        mesh = mg.build_mesh('mm', Fraction(1, 12), 6)
        path = write_obj(mesh, tmp_path / "mesh.obj", comment="hhk mesh surface=mm")
        text = path.read_text(encoding='ascii')
        assert text.startswith("# hhk mesh surface=mm\n")
        assert text.count("\nf ") == len(mesh.faces)
        assert text.count("\nvn ") == len(mesh.normals)
        npt.assert_array_equal(read_obj_vertices(path), mesh.vertices)
        first_face = next(line for line in text.splitlines() if line.startswith("f "))
        a, b, c = (int(part.split("//")[0]) for part in first_face.split()[1:])
        assert min(a, b, c) >= 1

    def test_scan_csv_roundtrip(self, tmp_path):
        report = curvature_scan(0, 16, 1e-3)
        path = write_scan_csv(report, tmp_path / "scan.csv")
        table = read_scan_csv(path)
        assert list(table.columns) == list(report.table.columns)
        pd.testing.assert_frame_equal(table, report.table, check_dtype=False, check_exact=True)

    def test_scan_json(self, tmp_path):
        report = curvature_scan(0, 16, 1e-3)
        path = export_report(report, tmp_path / "scan.json", 'json')
        document = read_json(path)
        assert document['samples'] == report.samples
        assert 'table' not in document

    def test_unknown_format(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            export_report(curvature_scan(0, 16, 1e-3), tmp_path / "scan.xml", 'xml')

    def test_certificate_json(self, tmp_path):
        cert = certify_sign(CurvNumerator(t=Fraction(0)), 0.0, '<0', max_depth=2, budget=100,
                            root=IntervalBox(xlo=-0.5, xhi=0.5, ylo=-0.5, yhi=0.5))
        path = write_json(cert, tmp_path / "cert.json")
        assert read_json(path, SignCertificate) == cert

    def test_format_from_extension(self, tmp_path):
        report = curvature_scan(0, 16, 1e-3)
        path = export_report(report, tmp_path / "scan.csv")
        assert list(read_scan_csv(path).columns) == list(report.table.columns)
        document = read_json(export_report(report, tmp_path / "scan.json"))
        assert document['resolution'] == 16

    def test_unbounded_enclosure_is_written_as_strings(self, tmp_path):
        cert = SignCertificate(expr='curvature(t=1/12, eps=+1)', region='D', sign='<0', verdict='Undecided',
                               boxes=3, depth=1, worst_box=IntervalBox(xlo=0.9, xhi=1.0, ylo=-0.1, yhi=0.0),
                               bounds=(-np.inf, np.inf))
        path = write_json(cert, tmp_path / "cert.json")
        assert 'Infinity' not in path.read_text(encoding='utf-8')
        assert read_json(path)['bounds'] == ['-inf', 'inf']
        assert read_json(path, SignCertificate).bounds == (-np.inf, np.inf)

    def test_plain_documents_are_strict_json(self, tmp_path):
        path = write_json({'max': np.float64(np.nan), 'count': np.int64(3), 'pair': (1.0, -np.inf)},
                          tmp_path / "doc.json")
        assert read_json(path) == {'max': 'nan', 'count': 3, 'pair': [1.0, '-inf']}
