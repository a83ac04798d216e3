"""
Syncshape Analyzer Configuration
Environment-driven settings for the scenario analyzer
"""

import os
from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ('true', '1', 'yes', 'on')


class AnalyzerConfig:
    """Analyzer configuration class"""

    # Logging Configuration
    LOG_LEVEL = os.getenv('SYNCSHAPE_LOG_LEVEL', 'INFO').upper()
    LOG_DIR = os.getenv('SYNCSHAPE_LOG_DIR', './logs')
    ENABLE_FILE_LOGGING = _flag('SYNCSHAPE_FILE_LOGGING', 'false')
    ENABLE_MEMORY_MONITORING = _flag('SYNCSHAPE_MEMORY_MONITORING', 'false')

    # Output Configuration
    OUTPUT_DIR = os.getenv('SYNCSHAPE_OUTPUT_DIR', './out')

    # Exploration Settings
    EXPLOSION_CEILING_RAW = os.getenv('SYNCSHAPE_EXPLOSION_CEILING', '200000')
    DEFAULT_SEED_RAW = os.getenv('SYNCSHAPE_DEFAULT_SEED', '0')
    ALLOW_SAMPLED_KNOWLEDGE = _flag('SYNCSHAPE_ALLOW_SAMPLED_KNOWLEDGE', 'false')

    # Command Module Configuration
    MODULES_ENABLED = {
        'simulation': _flag('SYNCSHAPE_ENABLE_SIMULATION', 'true'),
        'knowledge': _flag('SYNCSHAPE_ENABLE_KNOWLEDGE', 'true'),
        'protocols': _flag('SYNCSHAPE_ENABLE_PROTOCOLS', 'true'),
        'theorems': _flag('SYNCSHAPE_ENABLE_THEOREMS', 'true'),
        'export': _flag('SYNCSHAPE_ENABLE_EXPORT', 'true'),
    }

    EXPLOSION_CEILING = 200_000
    DEFAULT_SEED = 0

    @classmethod
    def validate(cls):
        """Collect every invalid variable into one error"""
        invalid_vars = []

        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if cls.LOG_LEVEL not in valid_levels:
            invalid_vars.append(f"SYNCSHAPE_LOG_LEVEL (must be one of: {', '.join(valid_levels)})")

        try:
            cls.EXPLOSION_CEILING = int(cls.EXPLOSION_CEILING_RAW)
            if cls.EXPLOSION_CEILING < 1:
                invalid_vars.append("SYNCSHAPE_EXPLOSION_CEILING (must be at least 1)")
        except ValueError:
            invalid_vars.append(f"SYNCSHAPE_EXPLOSION_CEILING (not an integer: {cls.EXPLOSION_CEILING_RAW!r})")

        try:
            cls.DEFAULT_SEED = int(cls.DEFAULT_SEED_RAW)
        except ValueError:
            invalid_vars.append(f"SYNCSHAPE_DEFAULT_SEED (not an integer: {cls.DEFAULT_SEED_RAW!r})")

        if invalid_vars:
            error_msg = "Analyzer configuration validation failed:\n"
            error_msg += f"⚠️  Invalid variables: {', '.join(invalid_vars)}\n"
            error_msg += "\n💡 Please check your .env file or environment configuration."
            raise ValueError(error_msg)

        return True


# Validate configuration on import
AnalyzerConfig.validate()
