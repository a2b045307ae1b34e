import json
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))
sys.path.insert(0, str(HERE / "fixtures"))

from bpmn_dl_lint import bundled_tbox  # noqa: E402
from bpmn_dl_lint.graph import load_diagram  # noqa: E402

FIXTURES = HERE / "fixtures"


@pytest.fixture(scope="session")
def tbox():
    return bundled_tbox()


@pytest.fixture(scope="session")
def vocab(tbox):
    from randgraph import Vocabulary
    return Vocabulary(tbox)


@pytest.fixture
def load(tbox):
    """Load a diagram given as a list of element records."""
    def _load(elements):
        return load_diagram(json.dumps({"elements": elements}), tbox)
    return _load


@pytest.fixture(scope="session")
def corpus():
    return json.loads((FIXTURES / "corpus.json").read_text())
