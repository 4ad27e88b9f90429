import struct

import numpy as np
import pytest

from coinrec import modelfile
from coinrec.classifier import forward, init_model
from coinrec.errors import ModelFormatError


def test_roundtrip_bitwise(tmp_path):
    m = init_model([400, 25, 14], seed=4, normalized=False)
    path = tmp_path / "m.bin"
    modelfile.save(m, path)
    back = modelfile.load(path)
    assert back.layer_sizes == m.layer_sizes and back.normalized is False
    for p, q in zip(m.params(), back.params()):
        assert p.tobytes() == q.tobytes()
    X = np.random.default_rng(0).random((100, 400))
    assert forward(m, X).tobytes() == forward(back, X).tobytes()


def test_layout():
    m = init_model([400, 25, 14], seed=1)
    data = modelfile.dumps(m)
    assert data[:8] == b"COINMLP1"
    assert struct.unpack_from("<IBI", data, 8) == (1, 1, 3)
    assert struct.unpack_from("<3I", data, 17) == (400, 25, 14)
    assert struct.unpack_from("<14H", data, len(data) - 28) == (1,) * 4 + (2,) * 4 + (5,) * 4 + (10,) * 2
    n_params = 400 * 25 + 25 + 25 * 14 + 14
    assert len(data) == 8 + 9 + 12 + 8 * n_params + 28
    first = np.frombuffer(data, "<f8", count=400, offset=29)
    assert np.array_equal(first, m.weights[0][0])


@pytest.mark.parametrize("mangle", [
    lambda d: b"XOINMLP1" + d[8:],
    lambda d: d[:-5],
    lambda d: d + b"\0",
    lambda d: d[:8] + struct.pack("<I", 9) + d[12:],
    lambda d: d[:20],
])
def test_corrupted(mangle):
    data = modelfile.dumps(init_model(seed=0))
    with pytest.raises(ModelFormatError):
        modelfile.loads(mangle(data))
