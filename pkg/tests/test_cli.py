import json

import pytest

from dlesim.cli import (
    EXIT_CONFIG,
    EXIT_GUARD,
    EXIT_IO,
    EXIT_OK,
    ConfigError,
    RunConfig,
    cmd_compare,
    cmd_exact,
    cmd_perturb,
    cmd_sweep,
    load_config,
    main,
)
from dlesim.model import TWO_PI


def read_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().strip().split("\n")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        rows.append(
            [None if cell == "" else float(cell) for cell in line.split(",")]
        )
    return header, rows


def fast_config(**kw):
    base = dict(t_final_ns=1.0, sample_dt_ns=0.05)
    base.update(kw)
    return RunConfig(**base)


class TestRunConfig:
    def test_defaults_are_paper_values(self):
        cfg = RunConfig()
        assert cfg.omega0_ghz == 5.439
        assert cfg.omega_c_ghz == 4.343
        assert cfg.g_eff_ghz == 0.050
        assert cfg.omega0 == pytest.approx(TWO_PI * 5.439)

    def test_switch_inputs_mutually_exclusive(self):
        with pytest.raises(ConfigError):
            RunConfig(switch_ratio=20.0, switch_freq_ghz=100.0)

    def test_switch_freq_ghz_converts(self):
        cfg = RunConfig(switch_freq_ghz=100.0)
        assert cfg.switching_frequency == pytest.approx(TWO_PI * 100.0)

    def test_validation_names_field(self):
        with pytest.raises(ConfigError, match="t_final_ns"):
            RunConfig(t_final_ns=-1.0)
        with pytest.raises(ConfigError, match="qubit_index"):
            RunConfig(qubit_index=5)
        with pytest.raises(ConfigError, match="order"):
            RunConfig(order=9)

    def test_nmax_resolution(self):
        cfg = RunConfig(order=2)
        assert cfg.resolved_n_max("perturb") == 2
        assert cfg.resolved_n_max("exact") == 2
        assert RunConfig(order=1).resolved_n_max("compare") == 2
        assert RunConfig(order=1).resolved_n_max("perturb") == 1
        assert RunConfig(order=3, n_max=4).resolved_n_max("perturb") == 4


class TestLoadConfig:
    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"omega0_ghz": 5.0, "bogus_key": 1}))
        with pytest.raises(ConfigError, match="bogus_key"):
            load_config(str(path))

    def test_roundtrip_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"switch_ratio": 12.5, "order": 1}))
        cfg = load_config(str(path))
        assert cfg.switch_ratio == 12.5
        assert cfg.order == 1

    def test_override_replaces_file_value(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"switch_freq_ghz": 30.0}))
        cfg = load_config(str(path), {"switch_ratio": 10.0})
        assert cfg.switch_ratio == 10.0
        assert cfg.switch_freq_ghz is None

    def test_invalid_json_reported(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(str(path))


class TestCmdExact:
    def test_default_run_structure(self, tmp_path):
        out = tmp_path / "exact.csv"
        assert cmd_exact(fast_config(), str(out)) == EXIT_OK
        header, rows = read_csv(out)
        assert header == ["t_ns", "p_excite", "photon_exp", "norm"]
        assert rows[0][0] == 0.0
        assert rows[-1][0] == 1.0
        assert all(row[1] >= 0.0 for row in rows)
        assert all(abs(row[3] - 1.0) <= 1e-9 for row in rows)

    def test_zero_coupling_all_zero(self, tmp_path):
        out = tmp_path / "exact.csv"
        cmd_exact(fast_config(g_eff_ghz=0.0), str(out))
        _, rows = read_csv(out)
        assert all(row[1] == 0.0 and row[2] == 0.0 for row in rows)

    def test_csv_roundtrips_full_precision(self, tmp_path):
        out = tmp_path / "exact.csv"
        cfg = fast_config()
        cmd_exact(cfg, str(out))
        _, rows = read_csv(out)
        from dlesim.propagator import propagate

        traj = propagate(
            cfg.system_params("exact"),
            cfg.coupling_schedule(),
            cfg.t_final_ns,
            cfg.sample_dt_ns,
        )
        p = traj.excitation_probabilities(cfg.qubit_index)
        for row, t, value in zip(rows, traj.times, p):
            assert row[0] == float(t)
            assert row[1] == float(value)


class TestCmdPerturb:
    def test_order_zero_all_zero(self, tmp_path):
        out = tmp_path / "pert.csv"
        assert cmd_perturb(fast_config(order=0), str(out)) == EXIT_OK
        header, rows = read_csv(out)
        assert header == ["t_ns", "p_excite", "norm_truncated"]
        assert all(row[1] == 0.0 for row in rows)
        assert all(row[2] == 1.0 for row in rows)

    def test_deterministic_byte_identical(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        cmd_perturb(fast_config(), str(out1))
        cmd_perturb(fast_config(), str(out2))
        assert out1.read_bytes() == out2.read_bytes()


class TestCmdCompare:
    def test_columns_and_agreement(self, tmp_path):
        out = tmp_path / "cmp.csv"
        assert cmd_compare(fast_config(), str(out)) == EXIT_OK
        header, rows = read_csv(out)
        assert header == [
            "t_ns",
            "p_exact",
            "p_pert",
            "p_closedform",
            "abs_diff_pert",
            "abs_diff_cf",
        ]
        assert all(row[3] is not None for row in rows)
        assert all(row[4] <= 1e-4 for row in rows)

    def test_zero_coupling_all_probability_columns_zero(self, tmp_path):
        out = tmp_path / "cmp.csv"
        cmd_compare(fast_config(g_eff_ghz=0.0), str(out))
        _, rows = read_csv(out)
        for row in rows:
            assert row[1] == 0.0 and row[2] == 0.0 and row[3] == 0.0

    def test_resonant_ratio_flags_closedform_column(self, tmp_path):
        out = tmp_path / "cmp.csv"
        code = cmd_compare(fast_config(switch_ratio=2.0), str(out))
        assert code == EXIT_GUARD
        _, rows = read_csv(out)
        assert all(row[3] is None and row[5] is None for row in rows)
        # the other pipelines still produced output
        assert all(row[1] is not None and row[2] is not None for row in rows)

    def test_closedform_column_empty_when_not_applicable(self, tmp_path):
        out = tmp_path / "cmp.csv"
        code = cmd_compare(fast_config(order=1), str(out))
        assert code == EXIT_OK
        _, rows = read_csv(out)
        assert all(row[3] is None for row in rows)


class TestCmdSweep:
    def test_rows_sorted_and_deterministic(self, tmp_path):
        cfg = fast_config(t_final_ns=0.5)
        out1 = tmp_path / "s1.csv"
        out2 = tmp_path / "s2.csv"
        cmd_sweep(cfg, str(out1), 10.0, 20.0, 3, max_workers=1)
        cmd_sweep(cfg, str(out2), 10.0, 20.0, 3, max_workers=2)
        assert out1.read_bytes() == out2.read_bytes()
        header, rows = read_csv(out1)
        assert header == ["switch_ratio", "sup_abs_diff", "max_p_pert"]
        ratios = [row[0] for row in rows]
        assert ratios == sorted(ratios)
        assert len(rows) == 3

    def test_invalid_range_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            cmd_sweep(fast_config(), str(tmp_path / "s.csv"), 20.0, 10.0, 3)
        with pytest.raises(ConfigError):
            cmd_sweep(fast_config(), str(tmp_path / "s.csv"), 5.0, 10.0, 1)

    def test_agreement_improves_with_ratio(self, tmp_path):
        out = tmp_path / "s.csv"
        cmd_sweep(fast_config(), str(out), 5.0, 20.0, 2, max_workers=1)
        _, rows = read_csv(out)
        assert rows[1][1] < rows[0][1]

    def test_perturbative_spike_at_breakdown_ratio(self, tmp_path):
        # the secular second-order response makes max p_pert spike when the
        # sweep range includes the twice-qubit-frequency resonance; the low
        # neighbor still rides the wing of the sum resonance at 1.7986, so
        # the sharp contrast is against the high side
        out = tmp_path / "s.csv"
        cfg = fast_config(t_final_ns=20.0, sample_dt_ns=0.05)
        cmd_sweep(cfg, str(out), 1.9, 2.1, 3, max_workers=1)
        _, rows = read_csv(out)
        by_ratio = {row[0]: row[2] for row in rows}
        assert by_ratio[2.0] > by_ratio[1.9]
        assert by_ratio[2.0] > 10 * by_ratio[2.1]


class TestMain:
    def test_exact_end_to_end(self, tmp_path):
        out = tmp_path / "out.csv"
        code = main(
            ["exact", "--out", str(out), "--t-final-ns", "0.5", "--switch-ratio", "15"]
        )
        assert code == EXIT_OK
        header, rows = read_csv(out)
        assert header[0] == "t_ns"
        assert rows[-1][0] == 0.5

    def test_config_error_exit_code(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"order": 99}))
        code = main(
            ["perturb", "--config", str(path), "--out", str(tmp_path / "o.csv")]
        )
        assert code == EXIT_CONFIG

    def test_io_error_exit_code(self, tmp_path):
        code = main(
            [
                "exact",
                "--out",
                str(tmp_path / "no_such_dir" / "o.csv"),
                "--t-final-ns",
                "0.2",
            ]
        )
        assert code == EXIT_IO

    def test_guard_exit_code(self, tmp_path):
        out = tmp_path / "cmp.csv"
        code = main(
            [
                "compare",
                "--out",
                str(out),
                "--switch-ratio",
                "2.0",
                "--t-final-ns",
                "0.5",
            ]
        )
        assert code == EXIT_GUARD
        assert out.exists()
