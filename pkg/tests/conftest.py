import json
import math

import numpy as np
import pytest

from lobound import BeamSplitter, gate_ns, gate_phase, gate_sign, ns_certificate
from lobound.cli import main
from lobound.primal import ns_reference_point

#: transmittivity of the best network of the non-linear sign shift
NS_KNEE = 1.0 - math.sqrt(2.0)


@pytest.fixture
def ns():
    return gate_ns()


@pytest.fixture
def sign3():
    return gate_sign(3)


@pytest.fixture
def phase_gate():
    return gate_phase(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20220214)


@pytest.fixture(scope="session")
def ns_cert():
    return ns_certificate()


@pytest.fixture(scope="session")
def ns_point():
    return ns_reference_point()


@pytest.fixture
def knee_splitter():
    return BeamSplitter(NS_KNEE, 0.0)


def random_symmetric(rng, dim):
    a = rng.standard_normal((dim, dim))

    return 0.5 * (a + a.T)


def comparable(document):
    """
    ``document`` without the fields that differ between two
    runs of one configuration: the timestamp and the output path.
    """

    trimmed = {key: value for key, value in document.items() if key != "timestamp"}
    trimmed["config"] = {key: value for key, value in document["config"].items() if key != "out"}

    return trimmed


@pytest.fixture
def run_cli(tmp_path, monkeypatch):
    """
    Runs the command line with ``argv`` writing to a temporary file;
    returns the exit status and the parsed document (``None`` if nothing
    was written).
    """

    monkeypatch.delenv("LOBOUND_WORKERS", raising=False)

    def run(*argv, out="out.json", workers=1):
        target = tmp_path / out
        arguments = list(argv) + ["--out", str(target)]

        if workers is not None:
            arguments += ["--workers", str(workers)]
        status = main(arguments)

        if not target.exists():
            return status, None
        text = target.read_text()

        return status, (json.loads(text) if out.endswith(".json") else text)

    return run
