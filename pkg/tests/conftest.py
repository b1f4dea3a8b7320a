import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from waringlab import kernels  # noqa: E402

BACKENDS = kernels.available_backends()


@pytest.fixture(params=["python", "cython"])
def backend(request):
    if request.param not in BACKENDS:
        pytest.skip("compiled extension not built")
    return BACKENDS[request.param]
