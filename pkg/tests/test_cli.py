import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qrelax.cli import run
from qrelax.io import (
    SchemaError,
    bundled_model_path,
    control_from_dict,
    decode_matrix,
    encode_matrix,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
)
from qrelax.operators import check_density_matrix, density_from_coherence
from qrelax.scenarios import TwoSpinParams, magic_control, random_damping_model, two_spin_model


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


class TestIO:
    def test_matrix_encoding(self):
        m = np.array([[1 + 2j, 0], [-0.5j, 3]])
        assert encode_matrix(m)[0][0] == [1.0, 2.0]
        np.testing.assert_array_equal(decode_matrix(encode_matrix(m)), m)

    def test_model_round_trip(self, rng, tmp_path):
        model = random_damping_model(2, rng)
        path = tmp_path / "m.json"
        save_model(model, path, "random")
        back = load_model(path)
        np.testing.assert_array_equal(back.hamiltonian, model.hamiltonian)
        for a, b in zip(back.dissipators, model.dissipators):
            np.testing.assert_array_equal(a, b)
        assert json.loads(path.read_text())["description"] == "random"

    @pytest.mark.parametrize("doc,path", [
        ({"n_qubits": 1, "dissipators": []}, "<root>"),
        ({"n_qubits": 1, "hamiltonian": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "dissipators": []}, "hamiltonian"),
        ({"n_qubits": 1, "hamiltonian": [[[0, 0]]], "dissipators": []}, "hamiltonian"),
        ({"n_qubits": 9, "hamiltonian": [[[0, 0]]], "dissipators": []}, "n_qubits"),
        ({"n_qubits": 1, "hamiltonian": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
          "dissipators": [[[[0, 0, 0]]]]}, "dissipators/0/0/0"),
    ])
    def test_schema_errors(self, doc, path):
        with pytest.raises(SchemaError) as info:
            model_from_dict(doc)
        assert info.value.path == path

    def test_control_names(self):
        spec = control_from_dict({"generators": ["X1", "Y1", "Z1", "X2", "Y2", "Z2"], "u": [1, 0, 0, 0, 0, 2]}, 2)
        assert spec.labels == ("X1", "Y1", "Z1", "X2", "Y2", "Z2")
        with pytest.raises(SchemaError):
            control_from_dict({"generators": ["X3"], "u": [1]}, 2)
        with pytest.raises(SchemaError):
            control_from_dict({"generators": ["X1"], "u": [1, 2]}, 2)

    def test_bundled(self):
        for name in ("one_spin", "two_spin", "dephasing"):
            assert bundled_model_path(name).exists()
        doc = model_to_dict(two_spin_model(TwoSpinParams(1, 1)))
        assert model_from_dict(doc).n_qubits == 2


class TestCommands:
    def test_fixed_point_bundled(self, capsys):
        code, out, _ = call(capsys, "fixed-point", "--model", "bundled:one_spin")
        assert code == 0
        header, rows = parse_csv(out)
        assert header[:3] == ["X", "Y", "Z"]
        assert [float(x) for x in rows[0][:3]] == [0.0, 0.0, 1.0]
        assert "# basis: [\"X\", \"Y\", \"Z\"]" in out

    def test_fixed_point_json_density_revalidates(self, capsys):
        code, out, _ = call(capsys, "fixed-point", "--uy", "1", "--format", "json")
        doc = json.loads(out)
        rho = decode_matrix(doc["rho"])
        check_density_matrix(rho, 1e-9)
        np.testing.assert_allclose(doc["rows"][0][:3], [0.5, 0, 0.5], atol=1e-15)

    def test_fixed_point_with_control_file(self, capsys, tmp_path):
        spec = magic_control(100.0)
        ctrl = tmp_path / "c.json"
        ctrl.write_text(json.dumps({"generators": list(spec.labels), "u": list(spec.u)}))
        model = tmp_path / "m.json"
        save_model(two_spin_model(TwoSpinParams(1.0, 100.0)), model)
        code, out, _ = call(capsys, "fixed-point", "--model", str(model), "--control", str(ctrl))
        assert code == 0
        header, rows = parse_csv(out)
        assert len(header) == 17 and header[-3] == "ZZ"
        rho = density_from_coherence(np.array([float(x) for x in rows[0][:15]]))
        check_density_matrix(rho, 1e-9)

    def test_ellipsoid(self, capsys):
        code, out, _ = call(capsys, "ellipsoid", "--gamma1", "1", "--gamma2", "1", "--samples", "500")
        header, rows = parse_csv(out)
        assert code == 0 and len(rows) == 500
        assert max(abs(float(r[header.index("ellipsoid_residual")])) for r in rows) < 1e-9

    def test_sweep(self, capsys):
        code, out, _ = call(capsys, "sweep-entanglement", "--gamma", "1", "--j-min", "0.01",
                            "--j-max", "1e4", "--points", "25")
        header, rows = parse_csv(out)
        assert code == 0 and len(rows) == 25
        assert 0.3496 <= float(rows[-1][header.index("eof")]) <= 0.3596

    def test_trajectory_methods_agree(self, capsys):
        args = ["trajectory", "--model", "bundled:two_spin", "--t", "2", "--steps", "4",
                "--initial", ",".join(["0"] * 14 + ["-1"])]
        _, a, _ = call(capsys, *args)
        _, b, _ = call(capsys, *args, "--method", "rk4", "--dt", "1e-3")
        ra = np.array(parse_csv(a)[1], dtype=float)
        rb = np.array(parse_csv(b)[1], dtype=float)
        assert ra.shape == (5, 16)
        np.testing.assert_allclose(ra, rb, atol=1e-10)

    def test_synthesize(self, capsys):
        code, out, _ = call(capsys, "synthesize", "--target", "0.5,0,0.5")
        header, rows = parse_csv(out)
        assert header == ["ux", "uy", "uz", "residual", "stabilizable", "achieved_error"]
        np.testing.assert_allclose([float(x) for x in rows[0][:3]], [0, 1, 0], atol=1e-12)
        assert rows[0][4] == "true"
        _, out, _ = call(capsys, "synthesize", "--target", "0.6,0,0.6")
        assert parse_csv(out)[1][0][4] == "false"

    def test_synthesize_invalid_target(self, capsys):
        code, _, err = call(capsys, "synthesize", "--target", "0.9,0,0.9")
        assert code == 2
        assert json.loads(err)["error"] == "InvalidStateError"

    def test_manifold_sample(self, capsys):
        code, out, _ = call(capsys, "manifold-sample", "--model", "bundled:two_spin", "--samples", "20")
        header, rows = parse_csv(out)
        assert code == 0 and len(rows) == 20
        assert min(float(r[-1]) for r in rows) >= -1e-9

    def test_pulsed(self, capsys):
        code, out, _ = call(capsys, "pulsed", "--uy", "1", "--dt", "0.01")
        header, rows = parse_csv(out)
        assert code == 0 and header == ["X", "Y", "Z", "transverse"]
        np.testing.assert_allclose([float(x) for x in rows[0][:3]], [0.5, 0, 0.5], atol=0.02)

    def test_pulsed_no_pulse(self, capsys):
        _, out, _ = call(capsys, "pulsed")
        np.testing.assert_allclose([float(x) for x in parse_csv(out)[1][0][:3]], [0, 0, 1], atol=1e-14)


class TestValidate:
    def test_one_spin(self, capsys):
        code, out, _ = call(capsys, "validate", "--model", "bundled:one_spin")
        assert code == 0
        assert "relaxing: true" in out
        assert "spectrum: -1, -1, -1" in out

    def test_dephasing(self, capsys):
        code, out, _ = call(capsys, "validate", "--model", "bundled:dephasing")
        assert code == 0
        assert "relaxing: false" in out
        assert "spectrum: -1, -1, 0" in out

    def test_non_hermitian(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n_qubits": 1, "hamiltonian": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]],
                                   "dissipators": []}))
        code, _, err = call(capsys, "validate", "--model", str(bad))
        assert code == 2
        assert json.loads(err)["path"] == "hamiltonian"

    def test_json_report(self, capsys):
        code, out, _ = call(capsys, "validate", "--format", "json")
        doc = json.loads(out)
        assert doc["relaxing"] is True and doc["fixed_point"] == {"X": 0.0, "Y": 0.0, "Z": 1.0}


class TestExitCodes:
    def test_not_relaxing(self, capsys):
        code, _, err = call(capsys, "fixed-point", "--model", "bundled:dephasing")
        assert code == 3
        doc = json.loads(err)
        assert doc["error"] == "NotRelaxingError" and "0" in doc["spectrum"]

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = call(capsys, "fixed-point", "--model", str(tmp_path / "nope.json"))
        assert code == 2

    def test_parse_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            run(["ellipsoid", "--samples", "many"])
        assert info.value.code == 2

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "qrelax", "fixed-point", "--model", "bundled:dephasing"],
                              capture_output=True, text=True)
        assert proc.returncode == 3


@pytest.mark.parametrize("argv", [
    ["sweep-entanglement", "--points", "9"],
    ["ellipsoid", "--samples", "50", "--seed", "4"],
    ["manifold-sample", "--samples", "10", "--seed", "2", "--format", "json"],
])
def test_byte_identical(capsys, tmp_path, argv):
    outs = []
    for k in range(2):
        path = tmp_path / f"out{k}"
        assert run(argv + ["--output", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
