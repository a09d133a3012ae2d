import csv
import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambda_holonomy.errors import InvalidSpec, IoFailure
from lambda_holonomy.experiments import (
    CSV_FIELDS,
    ExperimentConfig,
    ScanRow,
    alpha_scan,
    composed_path_pd,
    config_at,
    emit,
    load_rows,
    rows_to_csv,
    scan_gate,
    two_method_report,
)
from lambda_holonomy.holonomy import LissajousLoop

# a short run keeps the TDSE cheap while staying in the adiabatic window
FAST = ExperimentConfig(duration=2.0, wilson_steps=2000, alphas=(0.4, 0.9))
STATIC = LissajousLoop(1.0, 0.0, theta_amp=0.0, phi_amp=0.0)


@pytest.fixture(scope="module")
def default_report():
    return two_method_report(ExperimentConfig())


class TestComposedPath:
    @pytest.mark.parametrize("method", ["holonomy", "tdse"])
    def test_same_loop_twice(self, method):
        config = replace(FAST, loop2=FAST.loop1)
        assert composed_path_pd(config, method).pd == 0.0

    def test_abelian_surrogate(self):
        assert composed_path_pd(replace(FAST, connection="abelian"), "holonomy").pd <= 1e-10

    @given(st.floats(0.05, 1.0), st.floats(0.0, 1.0))
    @settings(max_examples=20)
    def test_swap_symmetry(self, alpha, beta):
        config = config_at(replace(FAST, wilson_steps=1000), alpha, beta)
        swapped = replace(config, loop1=config.loop2, loop2=config.loop1)
        pd = composed_path_pd(config, "holonomy").pd
        assert composed_path_pd(swapped, "holonomy").pd == pytest.approx(pd, abs=1e-12)

    def test_default_agreement(self, default_report):
        assert default_report.holonomy.pd >= 0.0
        assert abs(default_report.holonomy.pd - default_report.tdse.pd) <= 0.02

    def test_default_order_dependence(self, default_report):
        """The default loop pair is expected to show a nonzero P_d.

        The projected transport is pure gauge at fixed mixing angle, so
        both orders return the same state and P_d vanishes (see ledger).
        """
        assert default_report.holonomy.pd > 0.0

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            composed_path_pd(FAST, "euler")

    def test_populations_normalized(self):
        for method in ("holonomy", "tdse"):
            result = composed_path_pd(FAST, method)
            assert result.populations_12.sum() == pytest.approx(1.0, abs=1e-8)
            assert result.populations_21.sum() == pytest.approx(1.0, abs=1e-8)


class TestReport:
    def test_default_passes(self, default_report):
        assert default_report.passed
        assert default_report.causes == ()
        assert default_report.dynamical_phase_bound == pytest.approx(2.5e-2, rel=1e-4)

    def test_static_loops(self):
        report = two_method_report(replace(FAST, loop1=STATIC, loop2=STATIC))
        np.testing.assert_allclose(report.holonomy.populations_12, [1, 0, 0], atol=1e-15)
        np.testing.assert_allclose(report.tdse.populations_12, [1, 0, 0], atol=1e-12)
        assert report.population_diff_12.max() <= 1e-12
        assert report.passed

    def test_non_adiabatic_flagged(self):
        """Duration 0.5 is expected to fail with a leakage cause.

        The far-detuned eigenvector is constant at fixed mixing angle, so
        the reconstructed dynamics cannot leak out of the doublet.
        """
        report = two_method_report(replace(ExperimentConfig(), duration=0.5))
        assert not report.passed
        assert "leakage" in report.causes

    def test_to_dict_is_json(self, default_report):
        data = json.loads(json.dumps(default_report.to_dict()))
        assert data["passed"] is True


class TestScan:
    def test_single_point_same_loops(self):
        config = replace(FAST, loop2=FAST.loop1)
        rows = alpha_scan(config, alphas=[0.5])
        assert len(rows) == 1
        assert rows[0].pd_holonomy == 0.0 and rows[0].pd_tdse == 0.0

    def test_abelian_scan_null(self):
        rows = alpha_scan(replace(FAST, connection="abelian", duration=0.5))
        assert all(r.pd_holonomy <= 1e-10 for r in rows)

    def test_grid_order_and_threads(self):
        serial = alpha_scan(replace(FAST, duration=0.5))
        threaded = alpha_scan(replace(FAST, duration=0.5, workers=2))
        assert [r.alpha for r in serial] == [0.4, 0.9]
        assert rows_to_csv(serial) == rows_to_csv(threaded)

    def test_empty_grid(self):
        with pytest.raises(InvalidSpec):
            alpha_scan(FAST, alphas=[])

    def test_pd_in_unit_interval(self):
        for row in alpha_scan(replace(FAST, duration=0.5)):
            assert 0.0 <= row.pd_holonomy <= 1.0 and 0.0 <= row.pd_tdse <= 1.0

    def test_determinism(self, tmp_path):
        config = replace(FAST, duration=0.5, seed=7)
        for name in ("a.csv", "b.csv"):
            emit(alpha_scan(config), "csv", tmp_path / name)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_gate(self):
        rows = [ScanRow(0.1, 0.5, 0.10, 0.11, 0.3, 1e-3, 1e-7),
                ScanRow(0.2, 0.5, 0.02, 0.02, 0.1, 1e-3, 1e-7)]
        gate = scan_gate(rows)
        assert gate.passed
        assert gate.max_abs_diff == pytest.approx(0.01)
        assert not scan_gate(rows[1:]).magnitude_ok


ROW = ScanRow(0.3, 0.5, 0.123456789012345, 1 / 3, 2.5e-17, 0.0, 1e-9)


class TestEmit:
    def test_header_only(self, tmp_path):
        emit([], "csv", tmp_path / "out.csv")
        assert (tmp_path / "out.csv").read_text() == ",".join(CSV_FIELDS) + "\n"

    def test_one_row_round_trip(self, tmp_path):
        path = tmp_path / "out.csv"
        emit([ROW], "csv", path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0] == "alpha,beta,pd_holonomy,pd_tdse,commutator_norm,leakage,richardson_error"
        assert lines[1].split(",")[2] == "0.123456789012"
        (back,) = load_rows(path)
        for a, b in zip(back.values(), ROW.values()):
            assert a == pytest.approx(b, rel=5e-12)

    def test_json_mirrors_fields(self, tmp_path):
        path = tmp_path / "out.json"
        emit([ROW, ROW], "json", path)
        data = json.loads(path.read_text())
        assert [list(d) for d in data] == [list(CSV_FIELDS)] * 2
        assert load_rows(path)[0].pd_tdse == pytest.approx(1 / 3, rel=5e-12)

    @given(st.lists(st.floats(0, 1), min_size=7, max_size=7))
    def test_twelve_digit_round_trip(self, values):
        row = ScanRow(*values)
        parsed = next(csv.DictReader(rows_to_csv([row]).splitlines()))
        for name, v in zip(CSV_FIELDS, values):
            assert float(parsed[name]) == pytest.approx(v, rel=5e-12, abs=1e-300)

    def test_unwritable(self, tmp_path):
        with pytest.raises(IoFailure):
            emit([ROW], "csv", tmp_path / "missing" / "out.csv")

    def test_bad_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit([ROW], "xml", tmp_path / "out.xml")


class TestConfig:
    def test_json_round_trip(self, tmp_path):
        config = replace(FAST, seed=3, output_format="json", connection="large-detuning")
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config.to_dict()))
        assert ExperimentConfig.from_json(path) == config

    def test_partial_document(self):
        config = ExperimentConfig.from_dict({"duration": 10.0, "params": {"delta": 500.0, "omega": 1.0}})
        assert config.duration == 10.0 and config.params.delta == 500.0
        assert config.loop2.phase_offset == pytest.approx(math.pi / 2)

    @pytest.mark.parametrize("bad", [{"bogus": 1}, {"connection": "x"}, {"output_format": "xml"},
                                     {"alphas": []}, {"loop1": {"kind": "square"}}])
    def test_rejects(self, bad):
        with pytest.raises(InvalidSpec):
            ExperimentConfig.from_dict(bad)
