from __future__ import annotations

from datetime import datetime, timezone

import numpy as np
import pytest

from solardisagg.scenario import DEFAULT_LOCATION
from solardisagg.timeseries import TimeSeries, Unit


@pytest.fixture
def austin():
    return DEFAULT_LOCATION


def series(values, start="2018-06-01T00:00:00Z", step=30, unit=Unit.KW):
    t0 = datetime.fromisoformat(start.replace("Z", "+00:00")) \
        .astimezone(timezone.utc)
    return TimeSeries(t0, step, np.asarray(values, dtype=float), unit)


@pytest.fixture
def make_series():
    return series
