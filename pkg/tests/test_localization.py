import math

import numpy as np
import pytest

from comfortgraph.errors import CollinearBeacons, NoCellOnLevel, Underdetermined, ValidationError
from comfortgraph.graph import CellLocator, discretize
from comfortgraph.localization import (BeaconObservation, LocationFix, accuracy_from_residual, preprocess_stream,
                                       read_beacons, read_fixes, rssi_to_distance, snap_to_cell, trilaterate,
                                       trilaterate_ranges, write_fixes)

BEACONS = [(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]


def grid_oracle(anchors, ranges, step=0.01, pad=1.0):
    """Minimise the summed squared range error on a dense grid over the beacon box."""
    b = np.asarray(anchors)
    xs = np.arange(b[:, 0].min() - pad, b[:, 0].max() + pad + step / 2, step)
    ys = np.arange(b[:, 1].min() - pad, b[:, 1].max() + pad + step / 2, step)
    X, Y = np.meshgrid(xs, ys)
    cost = sum((np.hypot(X - bx, Y - by) - d) ** 2 for (bx, by), d in zip(b, ranges))
    i = np.unravel_index(np.argmin(cost), cost.shape)
    return np.array([X[i], Y[i]])


def test_rssi_reference_points():
    assert rssi_to_distance(-59, -59, 2) == 1.0
    assert rssi_to_distance(-79, -59, 2) == pytest.approx(10.0, rel=1e-12)
    assert rssi_to_distance(-80) > rssi_to_distance(-70)
    with pytest.raises(ValidationError):
        rssi_to_distance(-70, path_loss_exp=0)


def test_rssi_range_check():
    with pytest.raises(ValidationError):
        BeaconObservation("b", 0, 0, -130)


def test_exact_recovery():
    pos, resid = trilaterate_ranges(BEACONS, [math.sqrt(2), math.sqrt(10), math.sqrt(5)])
    assert np.hypot(*(pos - (1, 1))) <= 1e-6 and resid < 1e-9


def test_noisy_case_matches_grid_search():
    ranges = [math.sqrt(2) + 0.1, math.sqrt(10) + 0.1, math.sqrt(5) + 0.1]
    pos, resid = trilaterate_ranges(BEACONS, ranges)
    assert np.hypot(*(pos - grid_oracle(BEACONS, ranges))) <= 0.02
    assert resid > 0


def test_trilaterate_from_rssi():
    target = (1.5, 0.8)
    obs = [BeaconObservation(f"b{i}", x, y, -59 - 20 * math.log10(math.dist((x, y), target)))
           for i, (x, y) in enumerate(BEACONS + [(4.0, 3.0)])]
    (x, y), resid = trilaterate(obs)
    assert math.dist((x, y), target) < 1e-6


def test_degenerate_beacons():
    with pytest.raises(CollinearBeacons):
        trilaterate_ranges([(0, 0), (1, 0), (2, 0)], [1, 1, 1])
    with pytest.raises(Underdetermined):
        trilaterate([BeaconObservation("a", 0, 0, -60), BeaconObservation("b", 1, 0, -60)])


def test_accuracy_clamp():
    assert accuracy_from_residual(0.01) == 0.25
    assert accuracy_from_residual(1.2) == 1.2
    assert accuracy_from_residual(40.0) == 5.0


def _fix(t, lat=1.3, lon=103.77, acc=1.0, user="u", floor=3):
    return LocationFix(user, lat, lon, 12.0, floor, float(t), acc)


def test_stationary_hour_keeps_one_fix_per_minute():
    out = preprocess_stream([_fix(t) for t in range(3600)])
    assert len(out) == 60
    assert [f.timestamp for f in out] == [60.0 * i for i in range(60)]


def test_inaccurate_fixes_dropped():
    assert preprocess_stream([_fix(t, acc=6.0) for t in range(100)]) == []


def test_sparse_stream_unchanged_and_idempotent():
    sparse = [_fix(t * 120, lat=1.3 + t * 1e-5) for t in range(30)]
    assert preprocess_stream(sparse) == sparse
    dense = [_fix(t, lat=1.3 + (t // 7) * 3e-6) for t in range(900)]
    once = preprocess_stream(dense)
    assert preprocess_stream(once) == once


def test_moving_user_keeps_moves():
    # 1 m per second walk: every fix is beyond the displacement threshold
    fixes = [_fix(t, lat=1.3 + t / 111_000) for t in range(50)]
    assert len(preprocess_stream(fixes)) == 50


def test_per_user_subset_and_order():
    fixes = []
    for t in range(300):
        fixes.append(_fix(t, user="a"))
        fixes.append(_fix(t, user="b", acc=0.3 if t % 2 else 9.0))
    out = preprocess_stream(fixes)
    for u in "ab":
        mine = [f for f in out if f.user_id == u]
        assert all(f in fixes for f in mine)
        ts = [f.timestamp for f in mine]
        assert ts == sorted(set(ts))


def test_snap_matches_brute_force(square_model, rng):
    cells = discretize(square_model, 1.0)
    loc = CellLocator(cells)
    t = square_model.transform
    pts = rng.uniform(0, 10, (100, 2))
    for x, y in pts:
        lat, lon = t.local_to_global(x, y)
        got = snap_to_cell(_fix(0, lat, lon, floor=1), t, loc, {1: "L1"})
        d = [math.dist((x, y), c.center) for c in cells]
        best = min(d)
        assert got == min(c.id for c, dd in zip(cells, d) if dd <= best + 1e-9)


def test_snap_outside_floor_goes_to_boundary_cell(square_model):
    cells = discretize(square_model)
    lat, lon = square_model.transform.local_to_global(-5.0, 0.2)
    assert snap_to_cell(_fix(0, lat, lon, floor=1), square_model.transform, CellLocator(cells), {1: "L1"}) == "C1010001"
    with pytest.raises(NoCellOnLevel):
        snap_to_cell(_fix(0, lat, lon, floor=4), square_model.transform, CellLocator(cells), {1: "L1"})


def test_fix_and_beacon_csv(tmp_path):
    fixes = [_fix(t, lat=1.3 + t * 1e-6) for t in range(5)]
    write_fixes(fixes, tmp_path / "f.csv")
    assert read_fixes(tmp_path / "f.csv") == fixes
    (tmp_path / "b.csv").write_text("beacon_id,x,y,rssi,timestamp\nb1,0,0,-60,1\nb2,1,x,-60,1\n")
    with pytest.raises(ValidationError, match=":3"):
        read_beacons(tmp_path / "b.csv")
