from pathlib import Path
import environ

# Initialize environment variables
env = environ.Env(
    DEBUG=(bool, False)
)

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = env('SECRET_KEY', default='django-insecure-hilbertlab-local-only')

DEBUG = env('DEBUG')

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',

    'hilbertgeo',
]

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {},
    },
]


# Database
# The library keeps no persisted state; sqlite satisfies Django's checks.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True


# Hilbert geometry settings
# Every tolerance, budget and quadrature size used by the library.
HILBERTGEO = {
    'SEED': env.int('HILBERTGEO_SEED', default=0),
    'WORKERS': env.int('HILBERTGEO_WORKERS', default=1),
    'DET_TOL': env.float('HILBERTGEO_DET_TOL', default=1e-14),
    'EIGEN_GAP': env.float('HILBERTGEO_EIGEN_GAP', default=1e-8),
    'COLLINEAR_TOL': env.float('HILBERTGEO_COLLINEAR_TOL', default=1e-10),
    'HASH_QUANTUM': env.float('HILBERTGEO_HASH_QUANTUM', default=1e-7),
    'DEDUP_TOL': env.float('HILBERTGEO_DEDUP_TOL', default=1e-8),
    'HULL_DEDUP_TOL': 1e-9,
    'CLASS_BUDGET': env.int('HILBERTGEO_CLASS_BUDGET', default=10 ** 8),
    'ORBIT_BUDGET': env.int('HILBERTGEO_ORBIT_BUDGET', default=2_000_000),
    'N_RAYS': env.int('HILBERTGEO_N_RAYS', default=256),
    'GRID': env.int('HILBERTGEO_GRID', default=48),
    'POLYGON_SIDES': env.int('HILBERTGEO_POLYGON_SIDES', default=512),
    'WINDOW_FRACTION': env.float('HILBERTGEO_WINDOW_FRACTION', default=0.5),
    'MAX_WORD_LEN': env.int('HILBERTGEO_MAX_WORD_LEN', default=7),
    'ORBIT_RADIUS': env.int('HILBERTGEO_ORBIT_RADIUS', default=5),
    'MAX_ABS_S': env.float('HILBERTGEO_MAX_ABS_S', default=25.0),
    'SIDE': env('HILBERTGEO_SIDE', default='right'),  # 'right' or 'left'
    'LIMITSET_DEPTH': env.int('HILBERTGEO_LIMITSET_DEPTH', default=5),
    'PINGPONG_DEPTH': env.int('HILBERTGEO_PINGPONG_DEPTH', default=4),
    'CONVERGE_TOL': env.float('HILBERTGEO_CONVERGE_TOL', default=1e-4),
}


# Logging Configuration
LOG_DIR = BASE_DIR / 'logs'
LOG_DIR.mkdir(exist_ok=True)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
        'file': {
            'level': 'DEBUG',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': LOG_DIR / 'hilbertlab.log',
            'maxBytes': 1024 * 1024 * 15,  # 15MB
            'backupCount': 10,
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console', 'file'],
            'level': 'INFO',
            'propagate': True,
        },
        'hilbertgeo': {
            'handlers': ['console', 'file'],
            'level': env('HILBERTGEO_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
    },
}


# Sentry Configuration (Production Error Tracking)
SENTRY_DSN = env('SENTRY_DSN', default='')
if SENTRY_DSN and not DEBUG:
    import sentry_sdk
    from sentry_sdk.integrations.django import DjangoIntegration

    sentry_sdk.init(
        dsn=SENTRY_DSN,
        integrations=[DjangoIntegration()],
        traces_sample_rate=0.0,
        send_default_pii=False,
        environment=env('SENTRY_ENVIRONMENT', default='production'),
    )
