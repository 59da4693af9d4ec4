from types import SimpleNamespace

from subfactor_lab.models.report import SuiteResult
from subfactor_lab.utils.cache import (
    ReportCache, cached_suite, get_cache, invalidate_spec, suite_cache_key)


def _context(cache, fingerprint='abc123', depth=3, seed=0, tol=1e-8):
    spec = SimpleNamespace(fingerprint=lambda: fingerprint)
    return SimpleNamespace(spec=spec, depth=depth, seed=seed, tol=tol, cache=cache)


def test_memory_cache():
    cache = ReportCache(url='')
    assert not cache.is_redis_available()
    assert cache.get('k') is None
    assert cache.set('k', {'a': 1})
    assert cache.get('k') == {'a': 1}
    assert cache.delete('k')
    assert not cache.delete('k')


def test_unreachable_redis_falls_back_to_memory():
    cache = ReportCache(url='redis://127.0.0.1:1/0')
    assert not cache.is_redis_available()
    cache.set('k', 1)
    assert cache.get('k') == 1


def test_flush_pattern():
    cache = ReportCache(url='')
    for key in ('suite:abc:markov', 'suite:abc:pushdown', 'suite:def:markov'):
        cache.set(key, 1)
    assert cache.flush_pattern('suite:abc:*') == 2
    assert cache.get('suite:def:markov') == 1


def test_default_cache_is_shared():
    assert get_cache() is get_cache()


def test_cache_key_includes_run_settings():
    cache = ReportCache(url='')
    first = suite_cache_key('suite', _context(cache), 'markov')
    assert first == 'suite:abc123:markov:depth=3:seed=0:tol=1e-08'
    assert first != suite_cache_key('suite', _context(cache, seed=1), 'markov')
    assert first != suite_cache_key('suite', _context(cache, depth=2), 'markov')


def test_cached_suite_runs_once():
    calls = []

    @cached_suite(key_prefix='test')
    def run(context, name):
        calls.append(name)
        return SuiteResult(name, 'statement', context.tol, {'x': 1e-12}, wall_time=0.25)

    context = _context(ReportCache(url=''))
    first = run(context, 'markov')
    second = run(context, 'markov')
    assert calls == ['markov']
    assert second == first


def test_errors_are_not_cached():
    calls = []

    @cached_suite(key_prefix='test')
    def run(context, name):
        calls.append(name)
        return SuiteResult(name, 'statement', context.tol, error='boom')

    context = _context(ReportCache(url=''))
    run(context, 'markov')
    run(context, 'markov')
    assert calls == ['markov', 'markov']


def test_no_cache_in_context():
    calls = []

    @cached_suite()
    def run(context, name):
        calls.append(name)
        return SuiteResult(name, 'statement', context.tol)

    context = _context(None)
    run(context, 'markov')
    run(context, 'markov')
    assert len(calls) == 2


def test_invalidate_spec():
    cache = ReportCache(url='')
    cache.set(suite_cache_key('suite', _context(cache), 'markov'), {'suite': 'markov'})
    cache.set(suite_cache_key('suite', _context(cache, fingerprint='other'), 'markov'), {})
    assert invalidate_spec(cache, 'abc123') == 1
    assert cache.get(suite_cache_key('suite', _context(cache, fingerprint='other'), 'markov')) == {}
