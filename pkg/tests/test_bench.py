from photonmesh.bench import (
    BenchRecord,
    dense_epoch,
    run_batch_scenario,
    run_mesh_scenario,
    sliced_epoch,
)


def test_record_csv_row_format():
    r = BenchRecord("mesh", "sliced", 64, 64, 128, 1.234567, 4096)
    assert r.csv_row() == "mesh,sliced,64,64,128,1.234567,4096"


def test_sliced_epoch_larger_batches_are_faster():
    # equal total samples: one 512-sample batch beats thirty-two 16-sample
    # batches because per-window dispatch is amortized across the batch
    kind, ni, nl, samples = "clements", 16, 16, 512
    small = min(sliced_epoch(kind, ni, nl, 16, samples, seed=0)[0] for _ in range(5))
    large = min(sliced_epoch(kind, ni, nl, 512, samples, seed=0)[0] for _ in range(5))
    assert large < small


def test_epoch_measurements_scale_with_batch_memory():
    _, peak_small = sliced_epoch("fldzhyan", 16, 4, 8, 16, seed=0)
    _, peak_big = sliced_epoch("fldzhyan", 16, 4, 16, 16, seed=0)
    assert peak_big > peak_small
    _, dense_peak = dense_epoch("fldzhyan", 16, 4, 8, 16, seed=0)
    assert dense_peak > 2 * 16 * 16 * 16  # at least both mesh matrices


def test_scenario_runners_emit_expected_grids():
    recs = run_batch_scenario("fldzhyan", 8, 8, batch_sizes=(2, 4), samples=4, seed=1)
    assert [(r.scenario, r.engine, r.batch) for r in recs] == [
        ("batch", "sliced", 2),
        ("batch", "dense", 2),
        ("batch", "sliced", 4),
        ("batch", "dense", 4),
    ]
    recs = run_mesh_scenario(
        "fldzhyan", sizes=(8, 16), batch=4, samples=4, dense_cap=8, seed=1
    )
    assert [(r.engine, r.ni) for r in recs] == [
        ("sliced", 8),
        ("dense", 8),
        ("sliced", 16),
    ]
    assert all(r.nl == r.ni for r in recs)
