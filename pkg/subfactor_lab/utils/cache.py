import fnmatch
import logging
import pickle
from functools import wraps

import redis

from subfactor_lab.config import get_config
from subfactor_lab.models.report import SuiteResult

logger = logging.getLogger(__name__)


class ReportCache:
    """
    Cache for serialized suite results.

    Entries go to redis when REDIS_URL is set and the server answers a ping;
    otherwise they are kept in process memory.
    """

    def __init__(self, url=None, expire_seconds=None):
        config = get_config()
        self.url = config.REDIS_URL if url is None else url
        self.expire_seconds = config.CACHE_EXPIRE_SECONDS if expire_seconds is None else expire_seconds
        self.client = None
        self._memory = {}
        if self.url:
            try:
                client = redis.Redis.from_url(self.url)
                client.ping()  # Test the connection
                self.client = client
                logger.debug(f"Report cache connected to {self.url}")
            except (redis.ConnectionError, redis.exceptions.ConnectionError) as e:
                logger.warning(f"Redis server is not available, caching in memory: {e}")

    def is_redis_available(self):
        """Check if Redis is available"""
        return self.client is not None

    def get(self, key):
        """Get a value from the cache"""
        if not self.is_redis_available():
            return self._memory.get(key)

        try:
            data = self.client.get(key)
            if data:
                return pickle.loads(data)
            return None
        except Exception as e:
            logger.warning(f"Redis get error: {e}")
            return None

    def set(self, key, value, expire_seconds=None):
        """Set a value in the cache with expiration time"""
        expire_seconds = self.expire_seconds if expire_seconds is None else expire_seconds
        if not self.is_redis_available():
            self._memory[key] = value
            return True

        try:
            serialized_value = pickle.dumps(value)
            return self.client.setex(key, expire_seconds, serialized_value)
        except Exception as e:
            logger.warning(f"Redis set error: {e}")
            return False

    def delete(self, key):
        """Delete a key from the cache"""
        if not self.is_redis_available():
            return self._memory.pop(key, None) is not None

        try:
            return self.client.delete(key)
        except Exception as e:
            logger.warning(f"Redis delete error: {e}")
            return False

    def flush_pattern(self, pattern):
        """Delete all keys matching a glob pattern"""
        if not self.is_redis_available():
            keys = fnmatch.filter(list(self._memory), pattern)
            for key in keys:
                del self._memory[key]
            return len(keys)

        try:
            keys = self.client.keys(pattern)
            if keys:
                return self.client.delete(*keys)
            return 0
        except Exception as e:
            logger.warning(f"Redis flush pattern error: {e}")
            return False


_default_cache = None


def get_cache():
    """Process-wide ReportCache, created on first use."""
    global _default_cache
    if _default_cache is None:
        _default_cache = ReportCache()
    return _default_cache


def suite_cache_key(key_prefix, context, name):
    return (f"{key_prefix}:{context.spec.fingerprint()}:{name}"
            f":depth={context.depth}:seed={context.seed}:tol={context.tol!r}")


# Decorator for caching suite runs
def cached_suite(key_prefix='suite'):
    """
    Decorator for caching suite results keyed by spec, suite, depth, seed and tolerance.

    The wrapped function takes (context, name) and returns a SuiteResult. The
    cache is ``context.cache``; None disables caching for that context.
    """
    def decorator(f):
        @wraps(f)
        def decorated_function(context, name):
            cache = context.cache
            if cache is None:
                return f(context, name)

            cache_key = suite_cache_key(key_prefix, context, name)
            cached_result = cache.get(cache_key)
            if cached_result is not None:
                logger.debug(f"Cache hit: {cache_key}")
                return SuiteResult.from_dict(cached_result)

            result = f(context, name)
            if result.error is None:
                cache.set(cache_key, result.to_dict())
                logger.debug(f"Cached: {cache_key}")
            return result
        return decorated_function
    return decorator


def invalidate_spec(cache, fingerprint):
    """Drop every cached suite result of one spec."""
    return cache.flush_pattern(f"*:{fingerprint}:*")
