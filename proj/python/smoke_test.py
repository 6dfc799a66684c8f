"""Smoke tests for the _dalab extension module."""

import math
import os
import tempfile

import _dalab as dl


def test_schedule():
    assert dl.alpha_schedule(0.0, 1.0) == 0.0
    assert abs(dl.alpha_schedule(1.0, 1.0) - 0.9999092) < 1e-6
    w = dl.layer_weights("uniform", 0.1, 4, 0.5)
    assert all(abs(v - 0.025) < 1e-12 for v in w)


def test_data_roundtrip():
    src, tgt = dl.generate_figure1_toy(epsilon=0.1, n_per_domain=200, seed=3)
    assert len(src) == 200 and src.dim == 2
    gap = (sum(1 for y in src.labels if y == 1) -
           sum(1 for y in tgt.labels if y == 1)) / 200.0
    assert 0.1 < gap < 0.3
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "src.csv")
        dl.save_csv(src, path)
        back = dl.load_csv(path)
        assert back.labels == src.labels
        assert back.features == src.features


def test_training_and_risk():
    src, tgt = dl.generate_figure1_toy(epsilon=0.1, n_per_domain=300, seed=5)
    res = dl.dann_train(src, tgt, widths=[2, 16, 2], split_index=1,
                        alpha0=0.0, epochs=6, seed=1, disc_hidden=[8])
    assert not res.report.diverged
    assert 0.0 <= res.report.selected_src_val_err <= 1.0
    best_val = min(r.src_val_err for r in res.report.epochs)
    assert res.report.selected_epoch == max(
        e for e, r in enumerate(res.report.epochs) if r.src_val_err == best_val)
    assert 0.0 <= dl.zero_one_risk(res.net, tgt) <= 1.0

    res2 = dl.dann_train(src, tgt, widths=[2, 16, 2], split_index=1,
                         alpha0=0.0, epochs=6, seed=1, disc_hidden=[8])
    assert res2.report.selected_tgt_err == res.report.selected_tgt_err

    mres = dl.mdm_train(src, tgt, widths=[2, 16, 16, 2],
                        aligned_layers=[1, 2], scheme="linear",
                        alpha0=0.1, epochs=4, seed=2, disc_hidden=[8])
    assert not mres.report.diverged


def test_divergence_and_bounds():
    inst = dl.random_instance(seed=11)
    est = dl.exact_divergence("hdh", inst)
    assert 0.0 <= est["value"] <= 1.0
    rep = dl.bound_report(inst, split=1, f_index=0, g_index=0)
    assert rep["composed_rhs"] >= rep["r_t"] - 1e-12
    assert rep["main_rhs"] >= rep["r_t"] - 1e-12
    assert not rep["main_violated"]
    mono = dl.monotonicity_check(inst)
    assert mono["violations"] == 0

    back = dl.FiniteInstance.from_json(inst.to_json())
    assert back.id == inst.id
    assert back.space_sizes == inst.space_sizes


def test_certify():
    with tempfile.TemporaryDirectory() as d:
        summary = dl.certify_bounds(instances=5, seed=2, out_dir=d)
        assert summary["total_violations"] == 0
        assert summary["pairs_checked"] > 0
        assert os.path.exists(os.path.join(d, "bounds_summary.csv"))


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
