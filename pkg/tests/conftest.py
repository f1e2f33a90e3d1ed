from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from pndb.model import FieldSpec, ParameterValue, PrimitiveType, ScopePath
from pndb.store import Store

settings.register_profile(
    "local", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("local")


@pytest.fixture
def store(tmp_path):
    with Store.create(tmp_path / "store") as s:
        yield s


@pytest.fixture
def store_path(tmp_path):
    with Store.create(tmp_path / "store"):
        pass
    return tmp_path / "store"


def mother_volume_fields() -> list[FieldSpec]:
    return [
        FieldSpec("Version", PrimitiveType.INT,
                  comment="2001 VERSION WITH ENDCAP SHIFTED B"),
        FieldSpec("Rmin", PrimitiveType.FLOAT, comment="Inner Radius"),
        FieldSpec("Rmax", PrimitiveType.FLOAT, comment="Outer Radius"),
        FieldSpec("Zmax", PrimitiveType.FLOAT, comment="Maximum Z"),
    ]


def mother_volume_values() -> list[ParameterValue]:
    return [
        ParameterValue(PrimitiveType.INT, 2),
        ParameterValue(PrimitiveType.FLOAT, 0.0),
        ParameterValue(PrimitiveType.FLOAT, 1400.0),
        ParameterValue(PrimitiveType.FLOAT, 2350.0),
    ]


@pytest.fixture
def mother_volume(store):
    store.register_class("ATLASMotherVolume", mother_volume_fields())
    store.put_object("ATLASMotherVolume", "default", ScopePath.parse("/ATLAS"),
                     mother_volume_values())
    return store


MOTHER_VOLUME_TABLE = """\
#class ATLASMotherVolume
#instance default
#scope /ATLAS
Version|int|2||2001 VERSION WITH ENDCAP SHIFTED B
Rmin|float|0.0||Inner Radius
Rmax|float|1400.0||Outer Radius
Zmax|float|2350.0||Maximum Z
"""
