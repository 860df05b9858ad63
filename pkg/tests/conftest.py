import math

import pytest

from spatrel.model import AdjustmentSettings, FactBase, SpatialObject


@pytest.fixture
def settings() -> AdjustmentSettings:
    return AdjustmentSettings()


def box(ident: str, x=0.0, y=0.0, z=0.0, w=1.0, h=1.0, d=1.0,
        angle=0.0, **extra) -> SpatialObject:
    return SpatialObject(id=ident, x=x, y=y, z=z, w=w, h=h, d=d,
                         angle=angle, **extra)


def fact_base(*objects: SpatialObject) -> FactBase:
    fb = FactBase()
    for obj in objects:
        fb.upsert(obj)
    return fb


@pytest.fixture
def table_scene() -> FactBase:
    """A table with a lamp resting on it and a chair beside it."""
    return fact_base(
        box("table", x=2.0, y=0.0, z=1.0, w=1.2, h=0.75, d=0.8),
        box("lamp", x=2.1, y=0.75, z=1.1, w=0.2, h=0.4, d=0.2),
        box("chair", x=2.0, y=0.0, z=1.8, w=0.5, h=0.9, d=0.5, angle=math.pi),
    )
