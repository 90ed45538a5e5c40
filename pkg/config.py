"""
This are the default settings. (DONT CHANGE THIS FILE)
Adjust your settings in 'instance/application.py'
"""

import os
import logging

basedir = os.path.abspath(os.path.dirname(__file__))


def _env_int(name, default):
    value = os.getenv(name)
    return int(value) if value not in (None, '') else default


def _env_float(name, default):
    value = os.getenv(name)
    return float(value) if value not in (None, '') else default


class Config(object):
    DEBUG = False
    LOG_LEVEL = logging.WARNING

    SERVER_PORT = _env_int('SERVER_PORT', 8013)
    SERVER_HOST = os.getenv('SERVER_HOST', "0.0.0.0")

    # Sequential Monte Carlo swap search
    MEDOIDS_ALPHA = _env_float('MEDOIDS_ALPHA', 0.05)
    MEDOIDS_TAU = _env_float('MEDOIDS_TAU', 0.0)
    MEDOIDS_N_START = _env_int('MEDOIDS_N_START', 1000)
    MEDOIDS_GROWTH = _env_int('MEDOIDS_GROWTH', 10)
    # None means "size of the dataset"
    MEDOIDS_N_MAX = _env_int('MEDOIDS_N_MAX', None)
    MEDOIDS_SEED = _env_int('MEDOIDS_SEED', 0)
    MEDOIDS_PRACTICAL_OPTS = os.getenv('MEDOIDS_PRACTICAL_OPTS', '').lower() in ('1', 'true', 'yes')
    # 0 means all available cores
    MEDOIDS_THREADS = _env_int('MEDOIDS_THREADS', 0)
    MEDOIDS_EXHAUSTIVE_CAP = _env_int('MEDOIDS_EXHAUSTIVE_CAP', 200000)
    MEDOIDS_DEFAULT_METRIC = os.getenv('MEDOIDS_DEFAULT_METRIC', "L1")

    BOUNDS_C4 = _env_float('BOUNDS_C4', 32.0)
    BANDITS_TRIALS = _env_int('BANDITS_TRIALS', 200)

    DATA_DIR = os.getenv('DATA_DIR', os.path.join(basedir, "data"))

    # Master/worker mode
    WORKER_LISTEN = os.getenv('WORKER_LISTEN', "127.0.0.1:9731")
    MASTER_TIMEOUT = _env_float('MASTER_TIMEOUT', 300.0)


class DevelopmentConfig(Config):
    DEBUG = True
    LOG_LEVEL = logging.DEBUG


class TestingConfig(Config):
    TESTING = True
    MEDOIDS_THREADS = 1


# Map FLASK_ENV values to config classes
config_by_env = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': Config,
}


def resolved_defaults(config_class=None) -> dict:
    """Upper-case settings of a config class as a plain dict."""
    if config_class is None:
        config_class = config_by_env.get(os.getenv('FLASK_ENV', 'production'), Config)
    return {key: getattr(config_class, key) for key in dir(config_class) if key.isupper()}
