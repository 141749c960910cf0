import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polylat import _kernels  # noqa: E402


@pytest.fixture(scope="session")
def joe_kuo_file(tmp_path_factory):
    pytest.importorskip("scipy")
    from joe_kuo import joe_kuo_text

    path = tmp_path_factory.mktemp("dirs") / "new-joe-kuo-6.21201"
    path.write_text(joe_kuo_text())
    return path


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request):
    return _kernels.BACKENDS[request.param]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[name])
