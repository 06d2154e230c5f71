"""
Django settings for harvestduty project.

Only runtime concerns live here (secret key, debug flag, logging, library
defaults). Protocol parameters come from the TOML model config passed to
each management command, never from the environment.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', 'harvestduty-local-only-not-a-secret')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'protocol',
]

# No database: every computation is in-memory
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True


# Logging
# Console on stderr so stdout stays clean for reports and CSV

LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'protocol': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Simulation defaults, used when the model config leaves them out
HARVESTDUTY = {
    'DEFAULT_SEED': 20170612,
    'DEFAULT_CYCLES': 10_000,
    'SWEEP_WORKERS': 1,
}
