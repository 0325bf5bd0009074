import io
import json
import subprocess
import sys

import pytest

from adelic.cli import run
from adelic.textio import format_operator, parse_operator


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def test_reflect_symbolic():
    code, out = call("reflect", "--psi", "exp.json", "--symbolic-st")
    assert code == 0
    assert "canonical: (z+t) Dz^1 + (s*z) Dz^0" in out.splitlines()


def test_config_is_echoed():
    _, out = call("reflect", "--psi", "exp", "--s", "1/2", "--t", "sym")
    first = out.splitlines()[0]
    config = json.loads(first.split(": ", 1)[1])
    assert config["s"] == "1/2" and config["t"] == "sym" and config["subcommand"] == "reflect"


def test_rotate_outputs_companion():
    code, out = call("rotate", "--psi", "exp.json")
    assert code == 0
    assert "rotated: (z-t) Dz^1 + (-i*s*z) Dz^0" in out
    assert "companion:" in out


def test_structured_output_roundtrips():
    code, out = call("reflect", "--psi", "bessel52", "--format", "structured")
    assert code == 0
    payload = json.loads(out)
    terms = payload["canonical"]["terms"]
    text = " + ".join(f"({c}) Dz^{k}" for k, c in terms if c != "0")
    op = parse_operator(text)
    assert format_operator(parse_operator(format_operator(op))) == format_operator(op)


def test_repeated_runs_are_identical():
    assert call("fourier-basis", "--psi", "bessel32", "--caps", "2,2,,,,") == \
        call("fourier-basis", "--psi", "bessel32", "--caps", "2,2,,,,")


def test_fourier_basis_dimension():
    code, out = call("fourier-basis", "--psi", "exp", "--caps", "2,2,,,,")
    assert code == 0 and "dimension: 9" in out and "inferred_n: 0" in out


def test_involution():
    code, out = call("involution", "--psi", "cm1", "--word", "b")
    assert code == 0 and "fixed: True" in out


def test_kernel():
    code, out = call("kernel", "--psi", "exp", "--s", "1")
    assert code == 0 and "kernel: (1)/(z+w)" in out and "exp((-1)*z+(-1)*w)" in out


def test_verify_parameter_family():
    code, out = call("verify", "--psi", "dg139.json", "--r", "1", "--s", "2", "--t", "1", "--format", "structured")
    assert code == 0
    reports = json.loads(out)["reports"]
    assert all(r["pass"] for r in reports)
    numeric = [r for r in reports if r["check"].startswith("kernel quadrature")]
    assert numeric and numeric[0]["residual"] <= 1e-8


def test_out_file(tmp_path):
    target = tmp_path / "r.txt"
    code, out = call("reflect", "--psi", "exp", "--out", str(target))
    assert code == 0 and out == "" and "canonical" in target.read_text()


@pytest.mark.parametrize("argv", [
    ("reflect", "--psi", "cm1"),
    ("reflect", "--psi", "missing.json"),
    ("reflect", "--psi", "exp", "--s", "abc"),
    ("reflect", "--psi", "exp", "--caps", "1,2"),
    ("reflect",),
])
def test_invalid_input_exit_code(argv):
    assert call(*argv)[0] == 2


def test_caps_exit_code():
    assert call("universal", "--psi", "bessel32", "--psi", "bessel52", "--caps", "1,1,,,,")[0] == 3


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as err:
        run(["reflect", "--bogus"])
    assert err.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "adelic", "reflect", "--psi", "exp", "--symbolic-st"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "(z+t) Dz^1 + (s*z) Dz^0" in proc.stdout
