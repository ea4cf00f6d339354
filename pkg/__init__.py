__all__ = [
    'errors',
    'series_engine',
    'surface_models',
    'flow_dynamics',
    'verification_suite',
    'suite_runner',
    'utils',
]
