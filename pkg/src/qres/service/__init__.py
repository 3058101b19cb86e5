"""FastAPI service exposing the quantum-resource pipeline.

The app module is loaded lazily so that importing the schemas (which the
runner and CLI need) does not pull in the endpoint layer.
"""


def create_app():
    from .app import create_app as _create

    return _create()


__all__ = ["create_app"]
