import shutil
import sys

import pytest

from rclc.cli import run
from rclc.codec import MockCodec
from rclc.detector import load_sidecar, roi_track
from rclc.metrics import sequence_roi_psnr
from rclc.pipeline import decode_video
from rclc.raster import parse_y4m

from conftest import IDENTITY_ENHANCER_CMD


@pytest.fixture
def workdir(tmp_path):
    return tmp_path


def synth_files(workdir, preset="moving-box"):
    y4m = workdir / "s.y4m"
    roi = workdir / "s.roi"
    assert run(["synth", "--preset", preset, "--out", str(y4m), "--roi", str(roi)]) == 0
    return y4m, roi


def test_lossless_chain(workdir, capsys):
    y4m, roi = synth_files(workdir)
    stream = workdir / "s.rclc"
    out = workdir / "r.y4m"
    assert run(["encode", "--input", str(y4m), "--gof", "2", "--blend", "bu",
                "--qp-roi", "4", "--qp-bg", "47", "--detector", f"sidecar:{roi}",
                "--codec", "mock", "--out", str(stream)]) == 0
    assert run(["decode", "--input", str(stream), "--codec", "mock",
                "--enhancer", "none", "--out", str(out)]) == 0
    capsys.readouterr()
    assert run(["eval", "--ref", str(y4m), "--dist", str(out), "--roi", str(roi),
                "--stream", str(stream)]) == 0
    text = capsys.readouterr().out
    assert "mean_roi_psnr=99.0000" in text
    assert "bitrate_kbps=" in text


def test_cli_matches_library(workdir):
    y4m, roi = synth_files(workdir, preset="textured")
    stream = workdir / "s.rclc"
    out = workdir / "r.y4m"
    assert run(["encode", "--input", str(y4m), "--gof", "4", "--qp-roi", "27",
                "--qp-bg", "42", "--detector", f"sidecar:{roi}",
                "--out", str(stream)]) == 0
    assert run(["decode", "--input", str(stream), "--out", str(out)]) == 0
    # the CLI result reproduces through direct library calls
    source = parse_y4m(y4m.read_bytes())
    decoded_lib = decode_video(stream.read_bytes(), MockCodec())
    decoded_cli = parse_y4m(out.read_bytes())
    assert decoded_cli.frames == decoded_lib.frames
    boxes = roi_track(load_sidecar(roi.read_text()), len(source.frames),
                      source.width, source.height)
    scores = sequence_roi_psnr(source, decoded_cli, boxes)
    assert min(scores) > 20.0


def test_bdrate_identical_curves(workdir, capsys):
    csv = workdir / "a.csv"
    csv.write_text("100,30\n200,33\n400,36\n800,39\n")
    assert run(["bdrate", "--anchor", str(csv), "--test", str(csv)]) == 0
    assert "bd_rate=0.00%" in capsys.readouterr().out


def test_usage_errors_exit_1(capsys):
    assert run(["encode"]) == 1  # no --input
    assert "usage error" in capsys.readouterr().err
    assert run(["encode", "--input", "x.y4m", "--out", "y.rclc",
                "--codec", "nonsense"]) == 1
    assert run([]) == 1
    assert run(["synth", "--preset", "bogus", "--out", "a", "--roi", "b"]) == 1


def test_runtime_errors_exit_2(workdir, capsys):
    missing = workdir / "missing.y4m"
    assert run(["encode", "--input", str(missing), "--out", str(workdir / "o.rclc")]) == 2
    assert "error" in capsys.readouterr().err
    bad = workdir / "bad.rclc"
    bad.write_bytes(b"XXXX garbage")
    assert run(["decode", "--input", str(bad), "--out", str(workdir / "o.y4m")]) == 2


def test_decode_with_feather(workdir):
    y4m, roi = synth_files(workdir, preset="textured")
    stream = workdir / "s.rclc"
    assert run(["encode", "--input", str(y4m), "--qp-roi", "27", "--qp-bg", "47",
                "--detector", f"sidecar:{roi}", "--out", str(stream)]) == 0
    plain = workdir / "plain.y4m"
    smooth = workdir / "smooth.y4m"
    assert run(["decode", "--input", str(stream), "--out", str(plain)]) == 0
    assert run(["decode", "--input", str(stream), "--enhancer", "feather:4",
                "--out", str(smooth)]) == 0
    assert plain.read_bytes() != smooth.read_bytes()


def test_decode_with_extern_enhancer(workdir):
    y4m, roi = synth_files(workdir)
    stream = workdir / "s.rclc"
    assert run(["encode", "--input", str(y4m), "--detector", f"sidecar:{roi}",
                "--out", str(stream)]) == 0
    plain = workdir / "plain.y4m"
    ext = workdir / "ext.y4m"
    assert run(["decode", "--input", str(stream), "--out", str(plain)]) == 0
    assert run(["decode", "--input", str(stream),
                "--enhancer", f"extern:{IDENTITY_ENHANCER_CMD}",
                "--out", str(ext)]) == 0
    assert plain.read_bytes() == ext.read_bytes()


def test_extern_codec_template_file(workdir):
    y4m, roi = synth_files(workdir)
    cp = shutil.which("cp")
    template = workdir / "codec.cfg"
    template.write_text(
        "# identity bitstream passthrough\n"
        f"encode = {cp} {{input}} {{output}} # {{qp}} {{w}} {{h}}\n"
        f"decode = {cp} {{input}} {{output}} # {{w}} {{h}}\n"
        "io = raw\n")
    stream = workdir / "s.rclc"
    out = workdir / "r.y4m"
    assert run(["encode", "--input", str(y4m), "--detector", f"sidecar:{roi}",
                "--codec", f"extern:{template}", "--qp-roi", "4", "--qp-bg", "47",
                "--out", str(stream)]) == 0
    assert run(["decode", "--input", str(stream), "--codec", f"extern:{template}",
                "--out", str(out)]) == 0
    # identity "codec" reproduces the source exactly
    assert parse_y4m(out.read_bytes()).frames == parse_y4m(y4m.read_bytes()).frames


def test_force_bu_flag(workdir, capsys):
    y4m, roi = synth_files(workdir)
    stream = workdir / "s.rclc"
    capsys.readouterr()
    assert run(["encode", "--input", str(y4m), "--gof", "8", "--force-bu", "3",
                "--detector", f"sidecar:{roi}", "--out", str(stream)]) == 0
    text = capsys.readouterr().out
    assert "frame=3 role=BU" in text
