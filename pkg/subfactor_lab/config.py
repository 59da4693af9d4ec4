"""
Configuration settings for subfactor-lab.
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _flag(name, default):
    return os.environ.get(name, default).lower() == 'true'


class Config:
    """Base configuration class"""
    DEBUG = False
    TESTING = False
    LOG_LEVEL = os.environ.get('SUBFACTOR_LOG_LEVEL', 'WARNING')

    # Residual and rank tolerances
    TOLERANCE = float(os.environ.get('SUBFACTOR_TOLERANCE', 1e-8))
    RANK_CUTOFF = float(os.environ.get('SUBFACTOR_RANK_CUTOFF', 1e-10))

    # Perron-Frobenius solver
    PF_TOLERANCE = float(os.environ.get('SUBFACTOR_PF_TOLERANCE', 1e-14))
    PF_MAX_ITER = int(os.environ.get('SUBFACTOR_PF_MAX_ITER', 100000))

    # Randomized checks
    SEED = int(os.environ.get('SUBFACTOR_SEED', 0))
    SAMPLES = int(os.environ.get('SUBFACTOR_SAMPLES', 16))

    # Center computation in block_structure
    CENTER_GAP = float(os.environ.get('SUBFACTOR_CENTER_GAP', 1e-6))
    CENTER_RETRIES = int(os.environ.get('SUBFACTOR_CENTER_RETRIES', 5))

    # Dense-matrix cost ceiling
    MAX_GNS_DIM = int(os.environ.get('SUBFACTOR_MAX_GNS_DIM', 4096))
    MAX_LEVEL_ENTRIES = int(os.environ.get('SUBFACTOR_MAX_LEVEL_ENTRIES', 2 ** 22))
    MAX_BASIS_CARDINALITY = int(os.environ.get('SUBFACTOR_MAX_BASIS_CARDINALITY', 4096))
    DEFAULT_DEPTH = int(os.environ.get('SUBFACTOR_DEFAULT_DEPTH', 5))

    # Celery settings (local development defaults)
    CELERY_BROKER_URL = os.environ.get('CELERY_BROKER_URL', 'redis://localhost:6379/0')
    CELERY_RESULT_BACKEND = os.environ.get('CELERY_RESULT_BACKEND', 'redis://localhost:6379/0')
    CELERY_TASK_ALWAYS_EAGER = _flag('CELERY_TASK_ALWAYS_EAGER', 'false')

    # Report cache; empty URL keeps the cache in process memory
    REDIS_URL = os.environ.get('REDIS_URL', '')
    CACHE_EXPIRE_SECONDS = int(os.environ.get('CACHE_EXPIRE_SECONDS', 86400))


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True
    # Suites run in-process unless a broker is configured explicitly
    CELERY_TASK_ALWAYS_EAGER = _flag('CELERY_TASK_ALWAYS_EAGER', 'true')


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    DEBUG = True
    SEED = 0
    CELERY_BROKER_URL = 'memory://'
    CELERY_RESULT_BACKEND = 'cache+memory://'
    CELERY_TASK_ALWAYS_EAGER = True
    REDIS_URL = ''


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False


# Configuration dictionary for different environments
config_by_name = {
    'dev': DevelopmentConfig,
    'test': TestingConfig,
    'prod': ProductionConfig
}


def get_config():
    """Get the current configuration based on environment"""
    env = os.environ.get('SUBFACTOR_ENV', 'dev')
    return config_by_name.get(env, DevelopmentConfig)
