"""Optional regression fixture against the reference two-index return data.

The data set (3524 daily log-return pairs) is proprietary and not bundled.
Supply it as a CSV (label,x,y or x,y) via the CORRSEG_REALDATA_CSV
environment variable or at tests/data/real_returns.csv to activate this
test; otherwise it is skipped.
"""

import os
from pathlib import Path

import pytest

from corrseg import detect
from corrseg.cli import ingest_csv

_DEFAULT = Path(__file__).parent / "data" / "real_returns.csv"


def _fixture_path():
    env = os.environ.get("CORRSEG_REALDATA_CSV")
    if env and Path(env).exists():
        return Path(env)
    if _DEFAULT.exists():
        return _DEFAULT
    return None


@pytest.mark.skipif(_fixture_path() is None, reason="real-data CSV not supplied")
def test_reference_two_breaks_and_segment_correlations():
    pair = ingest_csv(_fixture_path())
    assert pair.T == 3524
    report = detect(pair)
    assert report.changepoints == (664, 2734)
    assert report.segment_correlations[0] == pytest.approx(0.6285, abs=5e-4)
    assert report.segment_correlations[1] == pytest.approx(0.5785, abs=5e-4)
    assert report.segment_correlations[2] == pytest.approx(0.7824, abs=5e-4)
