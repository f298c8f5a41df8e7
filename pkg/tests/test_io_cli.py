import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planarflow import gen_grid, gen_random_planar, solve
from planarflow.cli import main
from planarflow.io import (FormatError, dumps_instance, parse_cycle_file, parse_flow, parse_instance,
                           read_flow, read_instance, write_flow, write_instance)
from planarflow.segment import read_pgm, segment_image, write_pgm

TRIANGLE = """\
p planar 3 3 1 1
# a comment
r 0 0 2
r 1 1 0
r 2 2 1
e 0 1 4 0
e 1 2 4 0
e 2 0 0 3
s 0
t 2
"""


def test_parse_triangle():
    inst = parse_instance(TRIANGLE)
    assert inst.graph.n == 3 and inst.graph.num_edges == 3
    assert inst.capacity.tolist() == [4, 0, 4, 0, 0, 3]
    assert solve(inst.problem).value == 7


def test_round_trip_text():
    inst = gen_grid(5, (0, 9), 3, "random", 3, 3)
    text = dumps_instance(inst)
    assert parse_instance(text) == inst
    assert dumps_instance(parse_instance(text)) == text


@settings(max_examples=30)
@given(st.integers(2, 60), st.integers(0, 10 ** 6))
def test_round_trip_random(n, seed):
    inst = gen_random_planar(n, seed, 1, 1, delete_fraction=0.3)
    assert parse_instance(dumps_instance(inst)) == inst


def test_generators_are_seeded():
    assert gen_random_planar(50, 7, 3, 3) == gen_random_planar(50, 7, 3, 3)
    assert gen_grid(6, (0, 20), 7, "random", 3, 3) == gen_grid(6, (0, 20), 7, "random", 3, 3)
    assert gen_random_planar(50, 7, 3, 3) != gen_random_planar(50, 8, 3, 3)


def test_file_round_trip(tmp_path):
    inst = gen_random_planar(30, 1, 2, 2)
    write_instance(inst, tmp_path / "a.txt")
    assert read_instance(tmp_path / "a.txt") == inst
    res = solve(inst.problem)
    write_flow(res.flow, res.value, tmp_path / "a.flow")
    f, value = read_flow(tmp_path / "a.flow", inst.graph)
    assert f == res.flow and value == res.value


@pytest.mark.parametrize("text,line", [
    (TRIANGLE.replace("e 1 2 4 0", "e 1 2 x 0"), 7),
    (TRIANGLE.replace("e 1 2 4 0", "e 1 2 -4 0"), 7),
    (TRIANGLE.replace("e 1 2 4 0", "e 1 1 4 0"), 7),
    (TRIANGLE.replace("e 1 2 4 0", "e 1 9 4 0"), 7),
    (TRIANGLE.replace("s 0", "q 0"), 9),
    (TRIANGLE.replace("s 0", "s 7"), 9),
    (TRIANGLE.replace("r 2 2 1", "r 1 2 1"), 5),
    (TRIANGLE.replace("e 2 0 0 3", "e 2 1 0 3"), 8),
    ("r 0 1\n", 1),
    ("p planar 3 3\n", 1),
])
def test_malformed_input_reports_line(text, line):
    with pytest.raises(FormatError) as err:
        parse_instance(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


@pytest.mark.parametrize("text", [
    "",
    TRIANGLE.replace("p planar 3 3 1 1", "p planar 3 4 1 1"),
    TRIANGLE.replace("t 2", "t 0"),
    TRIANGLE.replace("r 2 2 1", "r 2 2"),
    TRIANGLE.replace("e 0 1 4 0", f"e 0 1 {2 ** 41} 0"),
])
def test_malformed_whole_file(text):
    with pytest.raises(FormatError):
        parse_instance(text)


def test_nonplanar_rotation_rejected():
    # K4 with a genus-one rotation
    text = "p planar 4 6 1 1\n" + "\n".join([
        "r 0 0 1 2", "r 1 0 3 4", "r 2 1 3 5", "r 3 2 4 5",
        "e 0 1 1 1", "e 0 2 1 1", "e 0 3 1 1", "e 1 2 1 1", "e 1 3 1 1", "e 2 3 1 1",
        "s 0", "t 3"]) + "\n"
    with pytest.raises(FormatError, match="genus"):
        parse_instance(text)


def test_parse_flow_and_cycle_files():
    inst = parse_instance(TRIANGLE)
    f, value = parse_flow("value 7\nf 0 4\nf 1 4\nf 2 -3\n", inst.graph)
    assert value == 7 and f.values.tolist() == [4, 4, -3]
    with pytest.raises(FormatError) as err:
        parse_flow("value 7\nf 5 1\n", inst.graph)
    assert err.value.line == 2
    assert parse_cycle_file("cycle 1 2 3\nside 4 5\nside 6\n") == ([1, 2, 3], [4, 5, 6])
    with pytest.raises(FormatError):
        parse_cycle_file("side 1\n")


# -- command line -------------------------------------------------------------


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_generate_solve_verify(tmp_path, capsys):
    inst_path, flow_path = tmp_path / "g.txt", tmp_path / "g.flow"
    code, _, _ = run(capsys, "gen-grid", 4, "--capacity", "1:9", "--seed", 3, "-o", inst_path)
    assert code == 0
    code, out, _ = run(capsys, "solve", inst_path, "-o", flow_path, "--trace")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "value 11"
    assert "check_flow pass" in lines and "check_max pass" in lines
    assert any(line.startswith("trace max_depth=") for line in lines)
    code, out, _ = run(capsys, "verify", inst_path, flow_path, "--oracle")
    assert code == 0 and out.splitlines()[-1] == "OK"


def test_cli_generate_is_reproducible(capsys):
    _, a, _ = run(capsys, "gen-planar", 40, "--seed", 5, "--sources", 3, "--sinks", 3)
    _, b, _ = run(capsys, "gen-planar", 40, "--seed", 5, "--sources", 3, "--sinks", 3)
    assert a == b and a.startswith("p planar 40 ")


def test_cli_engines_agree(tmp_path, capsys):
    path = tmp_path / "p.txt"
    write_instance(gen_random_planar(60, 2, 5, 5), path)
    _, out, _ = run(capsys, "solve", path, "--engine", "oracle")
    assert out.splitlines()[0] == "value 125"
    code, _, err = run(capsys, "solve", path, "--engine", "apex")
    assert code == 2 and "single" in err
    write_instance(gen_random_planar(60, 2, 5, 1), path)
    _, a, _ = run(capsys, "solve", path, "--engine", "apex")
    _, b, _ = run(capsys, "solve", path)
    assert a.splitlines()[0] == b.splitlines()[0]


def test_cli_hassin_engine(tmp_path, capsys):
    path = tmp_path / "h.txt"
    write_instance(gen_grid(6, (1, 9), 1), path)
    code, _, err = run(capsys, "solve", path, "--engine", "hassin")
    assert code == 2 and "error" in err


def test_cli_side_to_side_mode(tmp_path, capsys):
    path, sep = tmp_path / "s.txt", tmp_path / "sep.txt"
    write_instance(gen_grid(5, (1, 9), 2), path)
    sep.write_text("cycle 2 7 12 17 22\nside 0 1 5 6 10 11 15 16 20 21\n")
    _, expected, _ = run(capsys, "solve", path)
    code, out, _ = run(capsys, "solve", path, "--mode", "side-to-side", "--separator", sep, "--debug")
    assert code == 0 and out.splitlines()[0] == expected.splitlines()[0]


def test_cli_verify_rejects_bad_flow(tmp_path, capsys):
    path, flow = tmp_path / "t.txt", tmp_path / "t.flow"
    path.write_text(TRIANGLE)
    flow.write_text("value 4\nf 0 4\nf 1 0\nf 2 0\n")
    code, out, _ = run(capsys, "verify", path, flow)
    assert code == 1 and "conservation" in out and out.splitlines()[-1] == "FAILED"


def test_cli_malformed_input(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text(TRIANGLE.replace("e 1 2 4 0", "e 1 2 4"))
    code, _, err = run(capsys, "solve", path)
    assert code == 2 and "line 7" in err


def test_cli_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "solve", tmp_path / "nope.txt")
    assert code == 2 and err.startswith("error:")


def test_cli_separate(tmp_path, capsys):
    path = tmp_path / "g.txt"
    write_instance(gen_grid(10), path)
    code, out, _ = run(capsys, "separate", path, "--uniform")
    fields = dict(line.split(" ", 1) for line in out.splitlines())
    assert code == 0 and int(fields["size"]) <= 4 * 10
    assert float(fields["inside_weight"]) <= 2 / 3 and float(fields["outside_weight"]) <= 2 / 3


def test_cli_bench(tmp_path, capsys):
    out_csv = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--sizes", "6,8", "--repeats", 2, "-o", out_csv)
    rows = out_csv.read_text().splitlines()
    assert code == 0 and rows[0].startswith("n,sources,sinks,seconds") and len(rows) == 5


def test_segment_recovers_rectangle(tmp_path, capsys):
    rng = np.random.default_rng(0)
    img = np.full((24, 24), 60.0)
    img[6:18, 8:20] = 190.0
    img = np.clip(img + rng.normal(0, 45, img.shape), 0, 255).astype(np.uint8)
    truth = np.zeros(img.shape, dtype=bool)
    truth[6:18, 8:20] = True
    seg = segment_image(img, threshold=125, smoothness=40, sigma=60)
    noisy = img > 125
    # smoothing beats thresholding the same noisy pixels
    assert (seg.mask == truth).mean() > 0.97 > (noisy == truth).mean()
    src, dst = tmp_path / "in.pgm", tmp_path / "out.pgm"
    write_pgm(src, img)
    code, out, _ = run(capsys, "segment", src, "-o", dst, "--threshold", 125,
                       "--smoothness", 40, "--sigma", 60)
    assert code == 0 and out.startswith("value ")
    assert np.array_equal(read_pgm(dst) > 0, seg.mask)
