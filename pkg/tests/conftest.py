import os

import pytest

from circulantwl.dimension import enumerate_schemes


@pytest.fixture(scope="session", autouse=True)
def scheme_cache_dir(tmp_path_factory):
    """Memoize scheme enumeration across the whole run via the cache env var."""
    path = tmp_path_factory.mktemp("scheme-cache")
    old = os.environ.get("CIRCULANTWL_CACHE")
    os.environ["CIRCULANTWL_CACHE"] = str(path)
    yield path
    if old is None:
        os.environ.pop("CIRCULANTWL_CACHE", None)
    else:
        os.environ["CIRCULANTWL_CACHE"] = old


@pytest.fixture(scope="session")
def schemes_up_to_13():
    return {n: enumerate_schemes(n).schemes for n in range(1, 14)}


@pytest.fixture(scope="session")
def schemes_up_to_16(schemes_up_to_13):
    out = dict(schemes_up_to_13)
    for n in (14, 15, 16):
        out[n] = enumerate_schemes(n).schemes
    return out
