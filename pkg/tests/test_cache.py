import pytest

from qsg.builtins import m2_commutant_phi, qmap_M2, qmap_Xn
from qsg.cache import (
    MAGIC,
    CorruptCache,
    HashMismatch,
    cache_dir,
    cache_load,
    cache_path,
    cache_save,
    cached_system,
    dumps,
    loads,
)

CAP = 8

BUILD = {"x3": lambda: qmap_Xn(3).algebra, "m2": lambda: qmap_M2().algebra, "phi": lambda: m2_commutant_phi().algebra}


@pytest.mark.parametrize("name", sorted(BUILD))
def test_round_trip_is_byte_exact(name, tmp_path):
    P = BUILD[name]()
    rs = P.system(CAP)
    path = tmp_path / "r.rules"
    cache_save(rs, path)
    again = cache_load(path, BUILD[name]())
    assert dumps(again) == path.read_text()
    assert again.rules == rs.rules
    assert again.finite_basis == rs.finite_basis


def test_header_format():
    P = qmap_Xn(2).algebra
    lines = dumps(P.system(CAP)).splitlines()
    assert lines[0] == f"{MAGIC} {P.hash} {CAP}"
    assert lines[1].startswith("status ") and " finite 1 " in lines[1]
    assert "a12 -> - a11 + 1" in lines


def test_hash_mismatch():
    text = dumps(qmap_Xn(2).algebra.system(CAP))
    with pytest.raises(HashMismatch):
        loads(text, qmap_Xn(3).algebra)


@pytest.mark.parametrize(
    "mangle",
    [
        lambda t: t[:-1],  # truncated: no final newline
        lambda t: t[: len(t) // 2],
        lambda t: t.replace("qsg-rewrite", "qsg-rewrote", 1),
        lambda t: t.replace(" -> ", " => ", 1),
        lambda t: t.replace("status", "state", 1),
        lambda t: t + "a11 -> a11\n",  # duplicate left side
        lambda t: t + "a11.a12 -> 0\n",  # reducible left side
        lambda t: t.replace(" + 1\n", "+1\n", 1),  # not canonical
    ],
)
def test_corrupt_files_are_rejected(mangle):
    P = qmap_Xn(2).algebra
    text = mangle(dumps(P.system(CAP)))
    with pytest.raises((CorruptCache, HashMismatch)) as e:
        loads(text, P)
    assert e.type is CorruptCache


def test_binary_garbage(tmp_path):
    p = tmp_path / "bad.rules"
    p.write_bytes(b"\xff\xfe\x00")
    with pytest.raises(CorruptCache):
        cache_load(p, qmap_Xn(2).algebra)


def test_cache_dir_follows_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("QSG_CACHE_DIR", str(tmp_path))
    assert cache_dir() == tmp_path
    P = qmap_Xn(3).algebra
    assert cache_path(P, CAP).parent == tmp_path
    assert cache_path(P, CAP).name.endswith(f"-{CAP}.rules")


def test_cached_system_writes_then_reads(tmp_path, monkeypatch):
    monkeypatch.setenv("QSG_CACHE_DIR", str(tmp_path))
    P = qmap_M2().algebra
    first = cached_system(P, CAP)
    path = cache_path(P, CAP)
    assert path.exists()
    Q = qmap_M2().algebra
    second = cached_system(Q, CAP)
    assert second.rules == first.rules


def test_corrupt_cache_is_recomputed(tmp_path, monkeypatch):
    monkeypatch.setenv("QSG_CACHE_DIR", str(tmp_path))
    P = qmap_Xn(2).algebra
    path = cache_path(P, CAP)
    path.write_text("garbage")
    rs = cached_system(P, CAP)
    assert len(rs) == 4
    assert loads(path.read_text(), P).rules == rs.rules


def test_use_cache_false_writes_nothing(tmp_path, monkeypatch):
    monkeypatch.setenv("QSG_CACHE_DIR", str(tmp_path))
    cached_system(qmap_Xn(2).algebra, CAP, use_cache=False)
    assert list(tmp_path.iterdir()) == []
