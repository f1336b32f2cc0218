"""Exception types shared across the toolkit."""


class ConfigError(ValueError):
    """Bad configuration, file format or command-line input (CLI exit code 2)."""


class DomainError(ValueError):
    """Model evaluated outside its validity domain (CLI exit code 3)."""
