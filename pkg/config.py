import os


class Config:
    # Discovery
    CBN_ALPHA = float(os.environ.get('CBN_ALPHA') or 0.05)
    CBN_INTERVENTIONS = int(os.environ.get('CBN_INTERVENTIONS') or 20)
    CBN_MAX_INTERVENTIONS = int(os.environ.get('CBN_MAX_INTERVENTIONS') or 320)  # per arm, after escalation
    CBN_OBSERVATIONS = int(os.environ.get('CBN_OBSERVATIONS') or 500)
    CBN_MAX_ORDER = int(os.environ.get('CBN_MAX_ORDER') or 3)
    CBN_SEED = int(os.environ.get('CBN_SEED') or 0)

    # Parameter learning
    CBN_PSEUDO_COUNT = float(os.environ.get('CBN_PSEUDO_COUNT') or 1.0)
    CBN_MIN_ROW_COUNT = int(os.environ.get('CBN_MIN_ROW_COUNT') or 5)
    CBN_AUGMENT_SAMPLES = int(os.environ.get('CBN_AUGMENT_SAMPLES') or 20)

    # Logging
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'WARNING'
    LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

    DEBUG = False
    TESTING = False


class DevelopmentConfig(Config):
    DEBUG = True
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'


class ProductionConfig(Config):
    DEBUG = False


class TestingConfig(Config):
    TESTING = True
    CBN_SEED = 0
    LOG_LEVEL = 'WARNING'


def settings_of(config_class) -> dict:
    """Uppercase attributes of a config class as a plain mapping."""
    return {key: getattr(config_class, key) for key in dir(config_class) if key.isupper()}
