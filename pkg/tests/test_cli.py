import csv
import json

import numpy as np
import pytest

from vosedge.cli import main, parse_args
from vosedge.image import ColorImage, EdgeMap, load_edge_map, load_image, save_image


@pytest.fixture
def step_files(tmp_path):
    assert main(["synth", "--profile", "step", "--size", "64", "--seed", "7",
                 "--color-a", "255,0,0", "--color-b", "0,0,255", "-o", str(tmp_path / "step.png")]) == 0
    return tmp_path / "step.png", tmp_path / "step_truth.png"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_detect_constant_image(tmp_path, capsys):
    save_image(ColorImage.filled(20, 20, (90, 10, 200)), tmp_path / "in.png")
    code, out, _ = run(["detect", "--algo", "vos", "--threshold", "0.2", tmp_path / "in.png",
                        "-o", tmp_path / "out.png"], capsys)
    assert code == 0
    assert out.strip() == "0"
    assert np.all(load_image(tmp_path / "out.png").data == 0)


def test_detect_sobel_on_step(step_files, tmp_path, capsys):
    image, _ = step_files
    code, out, _ = run(["detect", "--algo", "sobel", image, "-o", tmp_path / "s.png"], capsys)
    assert code == 0
    assert int(out) > 0
    assert load_edge_map(tmp_path / "s.png").count == int(out)


@pytest.mark.parametrize("algo", ["vos", "sobel", "prewitt", "roberts", "laplacian", "canny"])
def test_detect_every_algorithm(step_files, tmp_path, capsys, algo):
    image, _ = step_files
    code, out, _ = run(["detect", "--algo", algo, image, "-o", tmp_path / f"{algo}.ppm"], capsys)
    assert code == 0 and int(out) > 0


def test_detect_workers_bit_identical(rng, tmp_path, capsys):
    save_image(ColorImage(rng.integers(0, 256, (96, 80, 3))), tmp_path / "n.png")
    outputs = []
    for workers in ("1", "8"):
        path = tmp_path / f"w{workers}.png"
        assert run(["detect", "--algo", "vos", "--workers", workers, tmp_path / "n.png", "-o", path], capsys)[0] == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_detect_flags(step_files, tmp_path, capsys):
    image, _ = step_files
    code, _, _ = run(["detect", image, "-o", tmp_path / "x.png", "--border", "reflect",
                      "--strict-nms", "false", "--zero-mean-masks", "--workers", "auto"], capsys)
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["detect", "missing.png", "-o", "x.png"],
        ["detect", "--threshold", "2", "IMG", "-o", "x.png"],
        ["detect", "--strict-nms", "maybe", "IMG", "-o", "x.png"],
        ["detect", "--workers", "0", "IMG", "-o", "x.png"],
        ["nonsense"],
    ],
)
def test_detect_user_errors(step_files, tmp_path, capsys, argv):
    image, _ = step_files
    argv = [str(image) if a == "IMG" else a for a in argv]
    code, _, err = run(argv, capsys)
    assert code == 1
    assert err


def test_compare_table(step_files, tmp_path, capsys):
    image, truth = step_files
    code, out, _ = run(["compare", image, truth, "--csv", tmp_path / "t.csv", "--json", tmp_path / "t.json"], capsys)
    assert code == 0
    rows = list(csv.reader(open(tmp_path / "t.csv")))
    assert rows[0] == ["name", "pfom", "n_actual", "n_detected"]
    assert len(rows) == 1 + 6
    assert all(0 < float(r[1]) <= 1 for r in rows[1:])
    assert len(json.load(open(tmp_path / "t.json"))) == 6
    scores = [float(line.split()[2]) for line in out.splitlines()[1:7]]
    assert scores == sorted(scores, reverse=True)


def test_compare_oracle_ranked_first(step_files, tmp_path, capsys):
    image, truth = step_files
    code, out, _ = run(["compare", image, truth, "--include-oracle", "--csv", tmp_path / "t.csv"], capsys)
    assert code == 0
    first = out.splitlines()[1].split()
    assert first[1] == "oracle" and float(first[2]) == 1.0
    assert len(list(csv.reader(open(tmp_path / "t.csv")))) == 1 + 7


def test_compare_dimension_mismatch(step_files, tmp_path, capsys):
    image, _ = step_files
    save_image(EdgeMap(np.ones((5, 5), bool)), tmp_path / "small.png")
    code, _, err = run(["compare", image, tmp_path / "small.png"], capsys)
    assert code == 1 and "error" in err


def test_synth_deterministic_bytes(tmp_path, capsys):
    for name in ("a", "b"):
        assert run(["synth", "--profile", "step", "--size", "64", "--seed", "7", "-o", tmp_path / f"{name}.png"],
                   capsys)[0] == 0
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
    assert (tmp_path / "a_truth.png").read_bytes() == (tmp_path / "b_truth.png").read_bytes()


def test_synth_ridge_two_lines(tmp_path, capsys):
    run(["synth", "--profile", "ridge", "--transition", "3", "-o", tmp_path / "r.png",
         "--truth", tmp_path / "rt.png"], capsys)
    truth = load_edge_map(tmp_path / "rt.png").data
    assert np.count_nonzero(truth.any(axis=0)) == 2


def test_synth_noise_changes_image(tmp_path, capsys):
    run(["synth", "--profile", "ramp", "--noise", "10", "--seed", "1", "-o", tmp_path / "n.png"], capsys)
    run(["synth", "--profile", "ramp", "--seed", "1", "-o", tmp_path / "c.png"], capsys)
    assert not np.array_equal(load_image(tmp_path / "n.png").data, load_image(tmp_path / "c.png").data)


def test_synth_invalid(tmp_path, capsys):
    code, _, err = run(["synth", "--transition", "100", "-o", tmp_path / "x.png"], capsys)
    assert code == 1 and "transition_width" in err


@pytest.fixture
def hand_case(tmp_path):
    detected = np.zeros((3, 3), bool)
    truth = np.zeros((3, 3), bool)
    truth[1, 1] = True
    detected[1, 2] = True
    save_image(EdgeMap(detected), tmp_path / "d.png")
    save_image(EdgeMap(truth), tmp_path / "t.png")
    return tmp_path / "d.png", tmp_path / "t.png"


def test_eval_identical(hand_case, capsys):
    _, truth = hand_case
    code, out, _ = run(["eval", truth, truth, "--json"], capsys)
    assert code == 0
    assert json.loads(out)["pfom"] == 1.0


def test_eval_hand_case(hand_case, capsys):
    detected, truth = hand_case
    code, out, _ = run(["eval", detected, truth, "--json"], capsys)
    payload = json.loads(out)
    assert code == 0
    assert abs(payload["pfom"] - 0.9) < 1e-9
    assert (payload["n_actual"], payload["n_detected"]) == (1, 1)
    code, text, _ = run(["eval", detected, truth], capsys)
    assert "N_I=1" in text and "N_A=1" in text


def test_eval_m_sensitivity(hand_case, capsys):
    detected, truth = hand_case
    default = json.loads(run(["eval", detected, truth, "--json"], capsys)[1])["pfom"]
    approx = json.loads(run(["eval", detected, truth, "--json", "--m", "0.111111"], capsys)[1])["pfom"]
    # direct formula: 1 / (1 + m) at d = 1
    assert default == pytest.approx(1 / (1 + 1 / 9), abs=1e-12)
    assert approx == pytest.approx(1 / (1 + 0.111111), abs=1e-12)
    assert default != approx
    assert abs(default - approx) < 1e-5


def test_eval_errors(hand_case, tmp_path, capsys):
    detected, _ = hand_case
    save_image(EdgeMap(np.zeros((3, 3), bool)), tmp_path / "empty.png")
    save_image(EdgeMap(np.zeros((4, 3), bool)), tmp_path / "tall.png")
    assert run(["eval", tmp_path / "empty.png", tmp_path / "empty.png"], capsys)[0] == 1
    assert run(["eval", detected, tmp_path / "tall.png"], capsys)[0] == 1


def test_config_file_and_override(step_files, tmp_path, capsys):
    image, _ = step_files
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# detector settings\nalgo = sobel\nthreshold = 0.5\nstrict-nms = false\nworkers = 2\n")
    args = parse_args(["detect", str(image), "-o", "x.png", "--config", str(cfg)])
    assert (args.algo, args.threshold, args.strict_nms, args.workers) == ("sobel", 0.5, False, 2)
    args = parse_args(["detect", str(image), "-o", "x.png", "--config", str(cfg), "--threshold", "0.3"])
    assert args.threshold == 0.3 and args.algo == "sobel"
    code, out, _ = run(["detect", image, "-o", tmp_path / "y.png", "--config", cfg], capsys)
    assert code == 0 and int(out) > 0


def test_config_synth_colors(tmp_path, capsys):
    cfg = tmp_path / "synth.cfg"
    cfg.write_text("profile = ridge\ncolor_a = 10,20,30\ntransition = 2\n")
    assert run(["synth", "-o", tmp_path / "s.png", "--config", cfg], capsys)[0] == 0
    assert load_image(tmp_path / "s.png").pixel(0, 0) == (10, 20, 30)


def test_config_unknown_key(step_files, tmp_path, capsys):
    image, _ = step_files
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(["detect", image, "-o", tmp_path / "x.png", "--config", cfg], capsys)
    assert code == 1 and "colour" in err


def test_internal_error_exit_code(monkeypatch, step_files, tmp_path, capsys):
    import vosedge.cli as cli

    def boom(*_a, **_k):
        raise AssertionError("invariant broken")

    monkeypatch.setattr(cli, "detect_edges", boom)
    image, _ = step_files
    code, _, err = run(["detect", image, "-o", tmp_path / "x.png"], capsys)
    assert code == 2 and "internal" in err


def test_module_entry_point(step_files, tmp_path):
    import subprocess
    import sys

    image, truth = step_files
    proc = subprocess.run([sys.executable, "-m", "vosedge", "eval", str(truth), str(truth)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("R=1.0")
