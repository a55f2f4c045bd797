from fractions import Fraction

import pytest

from descprox.cli import main
from descprox.config import PRESETS, parse_instance, parse_probe, parse_system
from descprox.errors import ConfigurationError
from descprox.image import checker_image, read_ppm, write_ppm
from descprox.systems import CatMap, CircleRotation


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def body(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_parse_system_descriptor():
    s = parse_system("kind = rotation\nlambda = 3/8  # comment\nprobe = sector:8\n")
    assert isinstance(s.map, CircleRotation) and s.map.lam == Fraction(3, 8)
    assert s.probe.dimension == 8
    cat = parse_system("kind = cat\nN = 16\n")
    assert isinstance(cat.map, CatMap) and cat.probe.domain == "grid"


@pytest.mark.parametrize("text", [
    "kind = spiral\n",
    "kind = cat\n",
    "kind = rotation\nlambda = half\n",
    "kind = cat\nN = 4\nprobe = sector\n",
])
def test_bad_descriptors(text):
    with pytest.raises(ConfigurationError):
        parse_system(text)


def test_parse_probe_errors():
    with pytest.raises(ConfigurationError):
        parse_probe("rgb", "grid")
    with pytest.raises(ConfigurationError):
        parse_probe("wavy", "circle")


def test_instance_needs_sections():
    with pytest.raises(ConfigurationError):
        parse_instance("[source]\nkind = identity\n")


def test_table_bridge_instance_samples_table_keys():
    inst = parse_instance("""
[source]
kind = identity
[target]
kind = identity
[bridge]
kind = table
entries = 0 -> 0; 1/4 -> 1/4
""")
    assert inst.sample == [Fraction(0), Fraction(1, 4)]


def test_table1_exits_1_and_reports_disagreement(capsys):
    code, out = run(capsys, "table1")
    assert code == 1
    assert "obj1,obj2,near" in out
    assert "# computed: 8 near, 14 far over 22 listed entries" in out
    assert "# disagreement: table lists (A, C') as far" in out


def test_rotation_quarter(capsys):
    code, out = run(capsys, "rotation", "--lambda", "1/4")
    assert code == 0
    assert "# lam=1/4" in out and "# seed=0" in out
    lines = body(out)
    assert any("(exact): FAILS" in ln for ln in lines)
    assert "descriptive transitivity on basis [8 arcs, S=16], K=16: HOLDS" in lines
    assert "  iterates of U: (9π/20, 11π/20) -> (19π/20, 21π/20) -> (29π/20, 31π/20)" in lines
    assert "classical periods over 136 sampled angles: 4" in lines
    assert lines[-1] == "status: ok"


def test_rotation_irrational(capsys):
    code, out = run(capsys, "rotation", "--lambda", "sqrt(2)/2")
    assert code == 0
    assert "classical period search: unsupported (real angles)" in out
    assert "m_max=1000: DENSE-ON-BASIS" in out
    assert sum(ln.startswith("  (") and "period" in ln for ln in out.splitlines()) == 8


def test_rotation_from_config_file(tmp_path, capsys):
    cfg = tmp_path / "sys.ini"
    cfg.write_text("kind = rotation\nlambda = 1/3\n")
    code, out = run(capsys, "rotation", "--config", str(cfg))
    assert code == 0 and "classical periods over 136 sampled angles: 3" in out


def test_bad_lambda_is_config_error(capsys):
    assert main(["rotation", "--lambda", "quarter"]) == 2
    assert "bad angle literal" in capsys.readouterr().err


def test_banks(capsys):
    code, out = run(capsys, "banks", "--metric")
    assert code == 0
    assert "descriptively sensitive: NOT-OBSERVED (max separation 0)" in out
    assert "metric sensitive: SENSITIVE" in out
    assert "descriptive periodic density: DENSE-ON-BASIS (periods [1])" in out


def test_output_is_deterministic(tmp_path):
    for cmd in (["banks"], ["rotation", "--lambda", "sqrt(2)/2"], ["conjugacy"]):
        path = tmp_path / "report.txt"
        main(cmd + ["--out", str(path)])
        first = path.read_bytes()
        main(cmd + ["--out", str(path)])
        assert path.read_bytes() == first
        assert first.decode().startswith(f"# descprox {cmd[0]}\n")


def test_cat_period(capsys):
    code, out = run(capsys, "cat", "--period", "256")
    assert code == 0 and "arnold period N=256: 192" in out


def test_cat_frames_and_track(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["cat", "--synthetic", "gradient", "--size", "16", "--iterations", "0,1,12",
                 "--track", "1,1,1,2", "--out", str(out)])
    assert code == 0
    report = (out / "report.txt").read_text()
    assert "arnold period 12" in report
    assert "frame t=12:" in report and "identical_to_input=True" in report
    assert read_ppm(out / "frame_t12.ppm") == read_ppm(out / "frame_t0.ppm")
    track = (out / "track.csv").read_text()
    assert track.startswith("# descprox cat\n")
    assert len(body(track)) == 1 + 13


def test_cat_input_file_and_uniform_track(tmp_path, capsys):
    src = tmp_path / "in.ppm"
    write_ppm(src, checker_image(8))
    code, out = run(capsys, "cat", "--input", str(src), "--iterations", "6")
    assert code == 0 and "arnold period 6" in out
    code, out = run(capsys, "cat", "--synthetic", "uniform", "--size", "8", "--track", "0,0,3,5")
    assert code == 0
    rows = [ln.split(",") for ln in body(out) if ln[:1].isdigit()]
    assert rows and all(r[6] == "0" and r[7] == "0" for r in rows)


def test_cat_rejects_non_square(tmp_path, capsys):
    src = tmp_path / "wide.ppm"
    src.write_bytes(b"P6\n3 2\n255\n" + bytes(18))
    assert main(["cat", "--input", str(src), "--iterations", "1"]) == 2
    assert "square" in capsys.readouterr().err


def test_cat_malformed_ppm_reports_offset(tmp_path, capsys):
    src = tmp_path / "bad.ppm"
    src.write_bytes(b"P6\n2 2\n255\n\x00")
    assert main(["cat", "--input", str(src)]) == 2
    assert "byte 12" in capsys.readouterr().err


@pytest.mark.parametrize("preset, code", [
    ("identity-rotation", 0), ("broken-bridge", 2), ("discontinuous", 0), ("cat-self", 0),
])
def test_conjugacy_presets(capsys, preset, code):
    got, out = run(capsys, "conjugacy", "--preset", preset)
    assert got == code
    if preset == "broken-bridge":
        assert "FAIL" in out and "witness x=1/256 k=1" in out
    if preset == "identity-rotation":
        assert "transitivity transport: CONFIRMED" in out
        assert "periodic density transport: CONFIRMED" in out
    if preset == "discontinuous":
        assert "NOT-APPLICABLE" in out


def test_conjugacy_config_file(tmp_path, capsys):
    cfg = tmp_path / "inst.ini"
    cfg.write_text(PRESETS["identity-rotation"])
    code, out = run(capsys, "conjugacy", "--config", str(cfg))
    assert code == 0 and "residual 0" in out
