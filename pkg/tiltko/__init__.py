__version__ = "0.1.0"

__all__ = ['models', 'knockoffs', 'estimation', 'filters', 'inference', 'utils', 'cli']
