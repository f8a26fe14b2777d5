import shutil
import tempfile

import pytest

from src.statelearn.models.partition import StatePartition
from src.statelearn.models.reports import CheckRecord, SearchConfig, ValidityReport
from src.statelearn.services.cache_service import CacheService
from src.statelearn.services.search_service import SearchService

TRUTH = StatePartition(exo_states=("z",), endo_states=("x",), controls=("y1", "y2"))
SETTINGS = {"strategy": "multiple", "alpha": 0.05}


@pytest.fixture
def temp_cache_dir():
    """Create a temporary cache directory for testing"""
    cache_dir = tempfile.mkdtemp(prefix="test_cache_")
    yield cache_dir
    shutil.rmtree(cache_dir, ignore_errors=True)


@pytest.fixture
def cache_service(temp_cache_dir):
    """Create a cache service instance for testing"""
    service = CacheService(cache_dir=temp_cache_dir, default_ttl=60)
    yield service
    service.close()


@pytest.fixture
def report():
    """A small validity report to store"""
    return ValidityReport(
        partition=TRUTH,
        strategy="multiple",
        tests=(CheckRecord(kind="lagstate-exo", label="x[t-1] _||_ z[t] | z[t-1]", p_value=0.4, statistic=0.8),),
        sig_level_used=0.05,
        valid=True,
        log_likelihood=-123.5,
    )


def test_cache_miss(cache_service):
    """Test cache miss behavior"""
    key = cache_service.evaluation_key("digest", TRUTH, SETTINGS)
    assert cache_service.get_report(key) is None


def test_cache_set_and_get(cache_service, report):
    """Test storing a report and reading it back"""
    key = cache_service.evaluation_key("digest", TRUTH, SETTINGS)
    assert cache_service.set_report(key, report)
    assert cache_service.get_report(key) == report


def test_key_depends_on_every_input():
    """Data, partition and settings all change the key"""
    base = CacheService.evaluation_key("digest", TRUTH, SETTINGS)
    assert base.startswith("eval:")
    assert base == CacheService.evaluation_key("digest", TRUTH, dict(SETTINGS))
    assert base != CacheService.evaluation_key("other", TRUTH, SETTINGS)
    assert base != CacheService.evaluation_key("digest", TRUTH, {**SETTINGS, "alpha": 0.1})
    swapped = StatePartition(exo_states=("z",), endo_states=("x",), controls=("y2", "y1"))
    assert base != CacheService.evaluation_key("digest", swapped, SETTINGS)


def test_cache_delete(cache_service, report):
    """Test deleting a single entry"""
    key = cache_service.evaluation_key("digest", TRUTH, SETTINGS)
    cache_service.set_report(key, report)
    assert cache_service.delete(key)
    assert cache_service.get_report(key) is None


def test_cache_clear(cache_service, report):
    """Test clearing all cache entries"""
    for alpha in (0.01, 0.05):
        cache_service.set_report(cache_service.evaluation_key("d", TRUTH, {"alpha": alpha}), report)
    assert cache_service.clear() == 2
    assert cache_service.get_report(cache_service.evaluation_key("d", TRUTH, {"alpha": 0.01})) is None


def test_cached_search_matches_uncached(cache_service, noisy_frame):
    """A second search served from the cache gives the same result"""
    cfg = SearchConfig(alpha=0.01, strategy="multiple", parallelism=1)
    plain = SearchService().run_search(noisy_frame, cfg)
    cached = SearchService(cache_service=cache_service)
    first = cached.run_search(noisy_frame, cfg)
    assert len(cache_service.cache) == first.models_tested
    second = cached.run_search(noisy_frame, cfg)
    assert first == plain
    assert second == plain
