import json
import sys

import numpy as np
import pytest

from negsel_verify.geometry import Box
from negsel_verify.network import Network
from negsel_verify.verifier import (
    ExternalAdapterConfig,
    ExternalProcessError,
    ExternalProtocolError,
    OutputCondition,
    Status,
    VerificationQuery,
    complete_verify,
    external_verify,
    serve_query_file,
)
from negsel_verify.verifier.external import read_query_file, write_query_file

from suite import query_suite

SELF_ADAPTER = ExternalAdapterConfig([sys.executable, "-m", "negsel_verify", "verify-query"])


def relu_query(lo=-1.0, hi=1.0, t=0.25):
    net = Network.from_weights([np.array([[1.0]]), np.array([[1.0]])], [np.zeros(1), np.zeros(1)])
    return VerificationQuery(net, Box.from_bounds([[lo, hi]]), OutputCondition.single([-1.0], -t, "<"))


def fake_verifier(tmp_path, body: str) -> ExternalAdapterConfig:
    script = tmp_path / "fake_verifier.py"
    script.write_text("import json, sys\nquery, verdict = sys.argv[1], sys.argv[2]\n" + body)
    return ExternalAdapterConfig([sys.executable, str(script)])


def test_query_file_round_trip(tmp_path):
    from negsel_verify.network import save_nnet

    q = relu_query()
    save_nnet(q.network, tmp_path / "n.nnet")
    write_query_file(q, tmp_path / "q.json", tmp_path / "n.nnet")
    doc = json.loads((tmp_path / "q.json").read_text())
    assert set(doc) == {"schema_version", "nnet_path", "bounds", "condition", "timeout_s"}
    back = read_query_file(tmp_path / "q.json")
    assert back.network == q.network and back.box == q.box and back.condition == q.condition


def test_serve_query_file(tmp_path):
    from negsel_verify.network import save_nnet

    q = relu_query()
    save_nnet(q.network, tmp_path / "n.nnet")
    write_query_file(q, tmp_path / "q.json", tmp_path / "n.nnet")
    serve_query_file(tmp_path / "q.json", tmp_path / "v.json")
    doc = json.loads((tmp_path / "v.json").read_text())
    assert doc["status"] == "sat" and len(doc["witness"]) == 1


def test_self_adapter_single_query():
    for q, expected in [(relu_query(), Status.SAT), (relu_query(-1.0, 0.0, 0.0), Status.UNSAT)]:
        v = external_verify(q, SELF_ADAPTER)
        assert v.status is expected
        assert v.backend.value == "external"


def test_corrupted_verdict_file(tmp_path):
    adapter = fake_verifier(tmp_path, "open(verdict, 'w').write('{not json')\n")
    with pytest.raises(ExternalProtocolError, match="JSON"):
        external_verify(relu_query(), adapter)


def test_unknown_status(tmp_path):
    adapter = fake_verifier(tmp_path, "json.dump({'status': 'maybe'}, open(verdict, 'w'))\n")
    with pytest.raises(ExternalProtocolError, match="status"):
        external_verify(relu_query(), adapter)


def test_out_of_box_witness(tmp_path):
    adapter = fake_verifier(tmp_path, "json.dump({'status': 'sat', 'witness': [5.0]}, open(verdict, 'w'))\n")
    with pytest.raises(ExternalProtocolError, match="outside"):
        external_verify(relu_query(), adapter)


def test_false_witness(tmp_path):
    adapter = fake_verifier(tmp_path, "json.dump({'status': 'sat', 'witness': [0.1]}, open(verdict, 'w'))\n")
    with pytest.raises(ExternalProtocolError, match="does not satisfy"):
        external_verify(relu_query(), adapter)


def test_sat_without_witness(tmp_path):
    adapter = fake_verifier(tmp_path, "json.dump({'status': 'sat'}, open(verdict, 'w'))\n")
    with pytest.raises(ExternalProtocolError, match="witness"):
        external_verify(relu_query(), adapter)


def test_no_verdict_written(tmp_path):
    adapter = fake_verifier(tmp_path, "pass\n")
    with pytest.raises(ExternalProtocolError, match="no verdict"):
        external_verify(relu_query(), adapter)


def test_nonzero_exit(tmp_path):
    adapter = fake_verifier(tmp_path, "sys.stderr.write('boom'); sys.exit(3)\n")
    with pytest.raises(ExternalProcessError, match="status 3"):
        external_verify(relu_query(), adapter)


def test_missing_executable(tmp_path):
    with pytest.raises(ExternalProcessError, match="cannot execute"):
        external_verify(relu_query(), ExternalAdapterConfig([str(tmp_path / "no-such-verifier")]))


def test_unsat_and_unknown_pass_through(tmp_path):
    adapter = fake_verifier(tmp_path, "json.dump({'status': 'unknown'}, open(verdict, 'w'))\n")
    assert external_verify(relu_query(), adapter).status is Status.UNKNOWN


def test_loopback_matches_builtin_on_part_of_suite():
    for q, _ in query_suite()[:10]:
        ext = external_verify(q, SELF_ADAPTER)
        ref = complete_verify(q)
        assert ext.status is ref.status
        if ref.witness is not None:
            assert ext.witness.tolist() == ref.witness.tolist()
