import numpy as np
import pytest

from diodeplots.reader import RunDir, RunDirError

from conftest import NX, NR, NMU


def test_open_requires_manifest(tmp_path):
    with pytest.raises(RunDirError) as err:
        RunDir.open(tmp_path)
    assert "manifest.json" in str(err.value)


def test_moments_and_potential(run_dir):
    run = RunDir.open(run_dir)
    t, block = run.final_moments()
    assert t == 10.0
    assert block["x"].size == NX
    assert np.all(block["rho"] > 0.0)
    pots = run.potential_table()
    x_nodes, v = pots[t]
    assert v[0] == 0.0
    assert v[-1] == pytest.approx(0.5)


def test_stats_block_shapes(run_dir):
    st = RunDir.open(run_dir).stats()
    assert st.mean.shape == (NX, NR, NMU)
    assert np.all(st.var >= 0.0)
    assert np.allclose(st.std, np.sqrt(st.var))


def test_snapshot_loading(run_dir):
    run = RunDir.open(run_dir)
    snap = run.load_snapshot()
    assert snap.time_ps == 10.0
    assert snap.data.shape == (2, 4, NX, NR, NMU)
    # snapshot component 0 agrees with the stats mean (same source field)
    st = run.stats()
    assert np.allclose(snap.cell_means(0), st.mean, atol=1e-12)


def test_missing_column_is_named(run_dir):
    path = run_dir / "moments.csv"
    text = path.read_text().replace("momentum", "momXYZ")
    path.write_text(text)
    with pytest.raises(RunDirError) as err:
        RunDir.open(run_dir).moment_table()
    assert "momentum" in str(err.value)


def test_missing_snapshot_header(run_dir):
    (run_dir / "snapshots" / "snap_0001.json").unlink()
    run = RunDir.open(run_dir)
    with pytest.raises(RunDirError) as err:
        run.load_snapshot()
    assert "snap_0001.json" in str(err.value)
