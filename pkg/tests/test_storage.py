"""Tests for so3_consensus.storage module."""

import json
from pathlib import Path

import numpy as np
import pytest

from so3_consensus.exceptions import DatasetParseError, InvalidRotationError
from so3_consensus.flow import run_flow
from so3_consensus.models import WeightedDataset
from so3_consensus.storage import (
    MATRIX,
    QUATERNION,
    atomic_write_text,
    metadata_path,
    points_path,
    read_dataset,
    read_trace,
    write_dataset,
    write_json,
    write_trace,
)
from tests.conftest import GEOMETRIC_DRILL, rot_z


class TestReadDataset:
    """Tests for parsing dataset files."""

    def test_matrix_records(self, tmp_path: Path) -> None:
        """Test nine comma-separated columns per record."""
        path = tmp_path / "data.csv"
        path.write_text("1,0,0,0,1,0,0,0,1\n-1,0,0,0,-1,0,0,0,1\n")

        data, info = read_dataset(path)

        assert len(data) == 2
        np.testing.assert_array_equal(data.rotations[1], np.diag([-1.0, -1.0, 1.0]))
        assert data.is_unweighted
        assert info.representation == MATRIX
        assert info.has_weights is False

    def test_whitespace_and_comments(self, tmp_path: Path) -> None:
        """Test whitespace separators, comment lines and trailing comments."""
        path = tmp_path / "data.txt"
        path.write_text(
            "# header line\n"
            "\n"
            "1 0 0  0 1 0  0 0 1   # identity\n"
            "1\t0\t0\t0\t1\t0\t0\t0\t1\n"
        )

        data, _ = read_dataset(path)
        assert len(data) == 2

    def test_weight_column(self, tmp_path: Path) -> None:
        """Test a tenth column is read as the weight."""
        path = tmp_path / "data.csv"
        path.write_text("1,0,0,0,1,0,0,0,1,0.25\n1,0,0,0,1,0,0,0,1,0\n")

        data, info = read_dataset(path)

        np.testing.assert_array_equal(data.weights, [0.25, 0.0])
        assert info.has_weights is True

    def test_quaternion_records(self, tmp_path: Path) -> None:
        """Test four and five column quaternion files."""
        path = tmp_path / "quats.csv"
        path.write_text("1,0,0,0\n0,0,0,1\n")
        data, info = read_dataset(path)

        assert info.representation == QUATERNION
        np.testing.assert_allclose(data.rotations[1], np.diag([-1.0, -1.0, 1.0]), atol=1e-15)

        path.write_text("1,0,0,0,2.5\n")
        data, info = read_dataset(path)
        assert info.has_weights is True
        assert data.weights[0] == 2.5

    def test_mixed_arity_raises(self, tmp_path: Path) -> None:
        """Test a record with a different column count is rejected."""
        path = tmp_path / "data.csv"
        path.write_text("1,0,0,0,1,0,0,0,1\n1,0,0,0,1,0,0,0,1,1\n")

        with pytest.raises(DatasetParseError, match="line 2") as exc_info:
            read_dataset(path)
        assert exc_info.value.line == 2

    def test_bad_column_count_raises(self, tmp_path: Path) -> None:
        """Test a seven column record is rejected."""
        path = tmp_path / "data.csv"
        path.write_text("1,0,0,0,1,0,0\n")

        with pytest.raises(DatasetParseError, match="4, 5, 9 or 10 columns"):
            read_dataset(path)

    def test_non_numeric_raises(self, tmp_path: Path) -> None:
        """Test a non-numeric field is rejected with its line number."""
        path = tmp_path / "data.csv"
        path.write_text("# comment\n1,0,0,0,1,0,0,0,x\n")

        with pytest.raises(DatasetParseError, match="line 2: non-numeric"):
            read_dataset(path)

    def test_negative_weight_raises(self, tmp_path: Path) -> None:
        """Test a negative weight is rejected."""
        path = tmp_path / "data.csv"
        path.write_text("1,0,0,0,1,0,0,0,1,-0.5\n")

        with pytest.raises(DatasetParseError, match="invalid weight"):
            read_dataset(path)

    def test_all_zero_weights_raise(self, tmp_path: Path) -> None:
        """Test a weighted file needs a positive weight."""
        path = tmp_path / "data.csv"
        path.write_text("1,0,0,0,1,0,0,0,1,0\n")

        with pytest.raises(DatasetParseError, match="no positive weight"):
            read_dataset(path)

    def test_empty_file_raises(self, tmp_path: Path) -> None:
        """Test a file with only comments is rejected."""
        path = tmp_path / "data.csv"
        path.write_text("# nothing here\n")

        with pytest.raises(DatasetParseError, match="no records"):
            read_dataset(path)

    def test_missing_file_raises(self, tmp_path: Path) -> None:
        """Test a missing file raises an OS error."""
        with pytest.raises(FileNotFoundError):
            read_dataset(tmp_path / "missing.csv")

    def test_non_rotation_raises(self, tmp_path: Path) -> None:
        """Test a reflection is rejected even with repair."""
        path = tmp_path / "data.csv"
        path.write_text("1,0,0,0,1,0,0,0,-1\n")

        with pytest.raises(InvalidRotationError, match="line 1"):
            read_dataset(path)
        with pytest.raises(InvalidRotationError):
            read_dataset(path, repair=True)

    def test_repair_projects_near_rotations(self, drill_averages_file: Path) -> None:
        """Test six-digit matrices need repair and are then projected."""
        with pytest.raises(InvalidRotationError):
            read_dataset(drill_averages_file)

        data, info = read_dataset(drill_averages_file, repair=True)

        assert info.repaired == 3
        np.testing.assert_allclose(data.rotations[1], GEOMETRIC_DRILL, atol=1e-5)

    def test_repair_normalizes_quaternions(self, tmp_path: Path) -> None:
        """Test a slightly long quaternion is normalized with repair."""
        path = tmp_path / "quats.csv"
        path.write_text("1.0001,0,0,0\n")

        with pytest.raises(InvalidRotationError):
            read_dataset(path)
        data, info = read_dataset(path, repair=True)
        assert info.repaired == 1
        np.testing.assert_allclose(data.rotations[0], np.eye(3), atol=1e-15)


class TestWriteDataset:
    """Tests for writing dataset files."""

    def test_matrix_round_trip(
        self, tmp_path: Path, weighted_cluster: WeightedDataset
    ) -> None:
        """Test matrices and weights survive a write and read."""
        path = write_dataset(tmp_path / "out.csv", weighted_cluster, include_weights=True)
        data, info = read_dataset(path)

        np.testing.assert_allclose(data.rotations, weighted_cluster.rotations, atol=1e-12)
        np.testing.assert_array_equal(data.weights, weighted_cluster.weights)
        assert info.has_weights

    def test_quaternion_round_trip(
        self, tmp_path: Path, weighted_cluster: WeightedDataset
    ) -> None:
        """Test the quaternion representation reproduces the rotations."""
        path = write_dataset(tmp_path / "out.csv", weighted_cluster, representation=QUATERNION)
        data, info = read_dataset(path)

        assert info.representation == QUATERNION
        np.testing.assert_allclose(data.rotations, weighted_cluster.rotations, atol=1e-12)
        assert data.is_unweighted

    def test_column_counts(self, tmp_path: Path, symmetric_pair: WeightedDataset) -> None:
        """Test the record widths of every layout."""
        for representation, weights, columns in [
            (MATRIX, False, 9),
            (MATRIX, True, 10),
            (QUATERNION, False, 4),
            (QUATERNION, True, 5),
        ]:
            path = write_dataset(
                tmp_path / "out.csv", symmetric_pair, representation, include_weights=weights
            )
            first = path.read_text().splitlines()[0]
            assert len(first.split(",")) == columns

    def test_header_is_commented(self, tmp_path: Path, symmetric_pair: WeightedDataset) -> None:
        """Test header lines are written as comments."""
        path = write_dataset(tmp_path / "out.csv", symmetric_pair, header="line one\nline two")
        lines = path.read_text().splitlines()

        assert lines[:2] == ["# line one", "# line two"]
        assert len(read_dataset(path)[0]) == 2

    def test_byte_identical_rewrites(
        self, tmp_path: Path, weighted_cluster: WeightedDataset
    ) -> None:
        """Test writing the same dataset twice gives the same bytes."""
        first = write_dataset(tmp_path / "a.csv", weighted_cluster, include_weights=True)
        second = write_dataset(tmp_path / "b.csv", weighted_cluster, include_weights=True)
        assert first.read_bytes() == second.read_bytes()

    def test_unknown_representation_raises(
        self, tmp_path: Path, symmetric_pair: WeightedDataset
    ) -> None:
        """Test only matrix and quat layouts are accepted."""
        with pytest.raises(ValueError, match="Unknown representation"):
            write_dataset(tmp_path / "out.csv", symmetric_pair, representation="euler")


class TestAtomicWrite:
    """Tests for atomic file replacement."""

    def test_creates_parents_and_leaves_no_temp_files(self, tmp_path: Path) -> None:
        """Test the target appears and no temporary sibling is left."""
        path = atomic_write_text(tmp_path / "nested" / "file.txt", "hello\n")

        assert path.read_text() == "hello\n"
        assert sorted(p.name for p in path.parent.iterdir()) == ["file.txt"]

    def test_replaces_existing(self, tmp_path: Path) -> None:
        """Test an existing file is replaced."""
        path = tmp_path / "file.txt"
        path.write_text("old")
        atomic_write_text(path, "new")
        assert path.read_text() == "new"

    def test_write_json_sorted(self, tmp_path: Path) -> None:
        """Test JSON output has sorted keys."""
        path = write_json(tmp_path / "report.json", {"b": 1, "a": [1.5, 2]})

        assert json.loads(path.read_text()) == {"a": [1.5, 2], "b": 1}
        assert path.read_text().index('"a"') < path.read_text().index('"b"')


class TestTrace:
    """Tests for trace and sphere point files."""

    def test_sidecar_paths(self) -> None:
        """Test metadata and point sidecar names."""
        assert metadata_path(Path("d/data.csv")) == Path("d/data.csv.meta.json")
        assert points_path(Path("d/trace.csv")) == Path("d/trace.points.csv")
        assert points_path(Path("d/trace")) == Path("d/trace.points.csv")

    def test_write_trace(self, tmp_path: Path, symmetric_pair: WeightedDataset) -> None:
        """Test the trace records and one point row per basis vector."""
        result = run_flow(symmetric_pair)
        trace_file, points_file = write_trace(tmp_path / "trace.csv", result, symmetric_pair)

        assert trace_file.read_text().splitlines()[0] == "t,potential,order_parameter"
        trace = read_trace(trace_file)
        assert trace.shape == (len(result.trace), 3)
        np.testing.assert_array_equal(trace[:, 0], [r.time for r in result.trace])
        np.testing.assert_array_equal(trace[:, 2], [r.order_parameter for r in result.trace])

        rows = points_file.read_text().splitlines()
        assert rows[0] == "member_index,vector_index,x,y,z"
        assert len(rows) == 1 + 3 * (len(symmetric_pair) + 1)
        assert rows[-1].startswith("-1,3,")

    def test_points_are_columns(self, tmp_path: Path) -> None:
        """Test sphere points are the rotation columns."""
        data = WeightedDataset.unweighted([rot_z(0.5)] * 2)
        result = run_flow(data)
        _, points_file = write_trace(tmp_path / "trace.csv", result, data)

        rows = np.loadtxt(points_file, delimiter=",", skiprows=1)
        first_member = rows[rows[:, 0] == 0]
        np.testing.assert_array_equal(first_member[:, 2:], rot_z(0.5).T)
