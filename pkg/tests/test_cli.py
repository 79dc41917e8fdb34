"""Command-line interface: exit codes, file round trips, output formats."""

import json

import pytest

from mrpke.cli import main
from mrpke.pke import PARAM_SETS

SEED = "11" * 32
MSG = "AB" * 13 + "01"  # 105-bit message for mrpke-1, padded with zero bits


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def keypair(tmp_path_factory):
    root = tmp_path_factory.mktemp("keys")
    pk, sk = str(root / "pk"), str(root / "sk")
    assert main(["keygen", "--params", "mrpke-1", "--pk", pk, "--sk", sk,
                 "--seed", SEED]) == 0
    return pk, sk


def test_keygen_encrypt_decrypt_round_trip(capsys, keypair, tmp_path):
    pk, sk = keypair
    ct = str(tmp_path / "ct")
    code, _, _ = run(capsys, "encrypt", "--pk", pk, "--msg", MSG, "--ct", ct,
                     "--seed", SEED)
    assert code == 0
    code, out, _ = run(capsys, "decrypt", "--sk", sk, "--ct", ct)
    assert code == 0
    assert out.strip() == MSG


def test_decrypt_to_file(capsys, keypair, tmp_path):
    pk, sk = keypair
    ct = str(tmp_path / "ct")
    out_file = tmp_path / "msg.bin"
    run(capsys, "encrypt", "--pk", pk, "--msg", MSG, "--ct", ct, "--seed", SEED)
    code, _, _ = run(capsys, "decrypt", "--sk", sk, "--ct", ct,
                     "--out", str(out_file))
    assert code == 0
    assert out_file.read_bytes().hex().upper() == MSG


def test_missing_seed_uses_os_entropy(capsys, tmp_path):
    pk, sk = str(tmp_path / "pk"), str(tmp_path / "sk")
    code, _, err = run(capsys, "keygen", "--params", "mrpke-1",
                       "--pk", pk, "--sk", sk)
    assert code == 0
    assert "seed:" in err
    echoed = err.split("seed:")[1].strip().split()[0]
    assert len(echoed) == 64 and echoed == echoed.upper()


def test_bad_seed_rejected(capsys, tmp_path):
    code, _, err = run(capsys, "keygen", "--params", "mrpke-1",
                       "--pk", str(tmp_path / "pk"), "--sk", str(tmp_path / "sk"),
                       "--seed", "zz")
    assert code == 1 and "seed" in err


def test_unknown_parameter_set(capsys, tmp_path):
    code, _, err = run(capsys, "keygen", "--params", "nope",
                       "--pk", str(tmp_path / "pk"), "--sk", str(tmp_path / "sk"),
                       "--seed", SEED)
    assert code == 1 and "unknown parameter set" in err


def test_missing_file_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "decrypt", "--sk", str(tmp_path / "nope"),
                       "--ct", str(tmp_path / "nope2"))
    assert code == 2


def test_truncated_ciphertext_is_io_error(capsys, keypair, tmp_path):
    pk, sk = keypair
    ct = tmp_path / "ct"
    run(capsys, "encrypt", "--pk", pk, "--msg", MSG, "--ct", str(ct),
        "--seed", SEED)
    ct.write_bytes(ct.read_bytes()[:100])
    code, _, err = run(capsys, "decrypt", "--sk", sk, "--ct", str(ct))
    assert code == 2 and "malformed ciphertext" in err


def test_invalid_message_is_validation_error(capsys, keypair, tmp_path):
    pk, _ = keypair
    code, _, err = run(capsys, "encrypt", "--pk", pk, "--msg", "AB",
                       "--ct", str(tmp_path / "ct"), "--seed", SEED)
    assert code == 1 and "invalid message" in err


def test_params_table_and_json(capsys):
    code, out, _ = run(capsys, "params", "--set", "mrpke-1")
    assert code == 0
    assert "14700" in out and "14158" in out
    code, out, _ = run(capsys, "params", "--set", "mrpke-1", "--json")
    row = json.loads(out)
    assert row["pk_bytes"] == 14700 and row["ct_bytes"] == 14158
    assert row["m"] == row["n"] == 81


def test_kat_gen_verify(capsys, tmp_path):
    kat = str(tmp_path / "kat.txt")
    code, _, _ = run(capsys, "kat-gen", "--params", "mrpke-1", "--count", "2",
                     "--out", kat)
    assert code == 0
    code, out, _ = run(capsys, "kat-verify", "--in", kat)
    assert code == 0 and "verified 2" in out


def test_kat_verify_detects_tampering(capsys, tmp_path):
    kat = tmp_path / "kat.txt"
    run(capsys, "kat-gen", "--params", "mrpke-1", "--count", "1",
        "--out", str(kat))
    text = kat.read_text()
    idx = text.index("msg = ") + len("msg = ")
    flipped = "0" if text[idx] != "0" else "1"
    kat.write_text(text[:idx] + flipped + text[idx + 1:])
    code, _, err = run(capsys, "kat-verify", "--in", str(kat))
    assert code == 1


def test_estimate_json_schema(capsys):
    code, out, _ = run(capsys, "estimate", "--params", "mrpke-1", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["set"] == "mrpke-1"
    names = {rep["attack"] for rep in payload["attacks"]}
    assert names == {"Kernel", "SupportMinors", "Minors"}
    for rep in payload["attacks"]:
        assert set(rep) == {"attack", "bits", "delta", "a", "l", "v", "b", "side"}
        assert rep["bits"] > 100
    assert payload["best"]["bits"] == min(r["bits"] for r in payload["attacks"])


def test_estimate_table_covers_all_sets(capsys):
    code, out, _ = run(capsys, "estimate", "--table")
    assert code == 0
    rows = json.loads(out)
    assert {row["set"] for row in rows} == set(PARAM_SETS)
    for row in rows:
        for key in ("kernel_bits", "sm_bits", "minors_bits", "pk_bytes", "ct_bytes"):
            assert key in row


def test_estimate_requires_target(capsys):
    code, _, err = run(capsys, "estimate")
    assert code == 1


def test_attack_demo_csv(capsys):
    code, out, _ = run(capsys, "attack-demo", "--shape", "2,6,6,6,1",
                       "--trials", "3", "--seed", SEED)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "trial,seed,iterations,success"
    assert len(lines) == 4
    for line in lines[1:]:
        trial, seed, iters, success = line.split(",")
        assert len(seed) == 64
        assert int(iters) >= 1 and int(success) in (0, 1)


def test_attack_demo_determinism(capsys):
    _, first, _ = run(capsys, "attack-demo", "--shape", "2,5,5,8,1",
                      "--trials", "4", "--seed", SEED)
    _, second, _ = run(capsys, "attack-demo", "--shape", "2,5,5,8,1",
                       "--trials", "4", "--seed", SEED)
    assert first == second


def test_onebit_demo_json(capsys):
    code, out, _ = run(capsys, "onebit-demo", "--l2", "5", "--trials", "200",
                       "--seed", SEED)
    assert code == 0
    payload = json.loads(out)
    assert payload["predicted_rate"] == 0.125
    assert 0 <= payload["rate"] <= 1


def test_reduce_demo_json(capsys):
    code, out, _ = run(capsys, "reduce-demo", "--trials", "1",
                       "--calibration", "40", "--seed", SEED)
    assert code == 0
    payload = json.loads(out)
    assert payload["oracle"] == "rank"
    assert set(payload["measured_advantage"]) == {"i0=1", "i0=2", "i0=3"}
    assert payload["successes"] == 1
    assert payload["wall_time_s"] > 0


def test_bench_json(capsys):
    code, out, _ = run(capsys, "bench", "--params", "mrpke-1",
                       "--iterations", "3", "--seed", SEED)
    assert code == 0
    payload = json.loads(out)
    for key in ("keygen_ms", "encrypt_ms", "decrypt_ms"):
        assert payload[key] > 0
