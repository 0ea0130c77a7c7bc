import json
import math

import numpy as np
import pytest

from gssd.cli import main as cli_main
from gssd.divergences import wasserstein_pp
from gssd.estimator import GssdConfig, estimate
from gssd.divergences import DivergenceSpec
from gssd.experiments import (
    ExperimentConfig,
    fit_loglog_slope,
    read_matrix_csv,
    run_displacement,
    run_noise_sweep,
    run_projection_complexity,
    run_sample_complexity,
    write_rows_csv,
    compare,
)
from gssd.rng import RngRoot, derive_stream
from gssd.slicing import SampleSet, project, sample_direction


def small_cfg(command, **kw):
    base = dict(
        command=command,
        dimensions=(6,),
        sample_sizes=(80,),
        sigmas=(1.0,),
        num_runs=2,
        divergences=("swd",),
        num_projections=16,
        order=2.0,
        seed=42,
        sinkhorn_max_iter=150,
    )
    base.update(kw)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------- slope fit


class TestFitLoglogSlope:
    def test_exact_power_law(self):
        xs = np.array([1.0, 4.0, 9.0, 25.0, 100.0])
        pts = list(zip(xs, xs**-0.5))
        assert fit_loglog_slope(pts) == pytest.approx(-0.5, abs=1e-12)

    def test_two_points(self):
        assert fit_loglog_slope([(1.0, 1.0), (100.0, 0.1)]) == pytest.approx(-0.5, abs=1e-12)

    def test_constant(self):
        assert fit_loglog_slope([(1.0, 2.0), (10.0, 2.0), (100.0, 2.0)]) == pytest.approx(0.0, abs=1e-12)

    def test_guards(self):
        with pytest.raises(ValueError):
            fit_loglog_slope([(1.0, 1.0)])
        with pytest.raises(ValueError):
            fit_loglog_slope([(1.0, 0.0), (2.0, 1.0)])


# ---------------------------------------------------------------- csv ingestion


class TestReadMatrixCsv:
    def test_plain_matrix(self, tmp_path):
        f = tmp_path / "m.csv"
        f.write_text("1.0,2.0\n3.0,4.0\n")
        m = read_matrix_csv(str(f))
        assert m.shape == (2, 2) and m[1, 0] == 3.0

    def test_optional_header(self, tmp_path):
        f = tmp_path / "m.csv"
        f.write_text("a,b\n1.0,2.0\n3.5,4.5\n")
        m = read_matrix_csv(str(f))
        assert m.shape == (2, 2) and m[0, 1] == 2.0

    def test_ragged_row_names_location(self, tmp_path):
        f = tmp_path / "m.csv"
        f.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ValueError, match="row 2"):
            read_matrix_csv(str(f))

    def test_non_numeric_cell_names_location(self, tmp_path):
        f = tmp_path / "m.csv"
        f.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ValueError, match="row 2, column 2"):
            read_matrix_csv(str(f))

    def test_empty_file_rejected(self, tmp_path):
        f = tmp_path / "m.csv"
        f.write_text("\n")
        with pytest.raises(ValueError):
            read_matrix_csv(str(f))


# ---------------------------------------------------------------- experiments


class TestSampleComplexity:
    def test_row_count_and_schema(self):
        cfg = small_cfg("sample-complexity", sample_sizes=(50, 100), divergences=("swd", "mmd"))
        rows = run_sample_complexity(cfg)
        assert len(rows) == 2 * 2 * 2  # sizes x runs x divergences
        assert {r.divergence for r in rows} == {"swd", "mmd"}
        assert all(r.value >= 0 for r in rows)

    def test_rerun_reproduces_values(self):
        cfg = small_cfg("sample-complexity")
        a = run_sample_complexity(cfg)
        b = run_sample_complexity(cfg)
        assert [r.value for r in a] == [r.value for r in b]
        assert [r.std_error for r in a] == [r.std_error for r in b]

    def test_emit_bound_appends_rows(self):
        cfg = small_cfg("sample-complexity", emit_bound=True)
        rows = run_sample_complexity(cfg)
        bound_rows = [r for r in rows if r.divergence == "theory-bound"]
        assert len(bound_rows) == 1
        assert bound_rows[0].value > 0


class TestProjectionComplexity:
    def test_reference_row_is_zero_and_errors_positive(self):
        cfg = small_cfg("projection-complexity", l_ref=256, l_grid=(16, 64, 256))
        rows = run_projection_complexity(cfg)
        assert len(rows) == 3 * 2
        at_ref = [r for r in rows if r.L == 256]
        assert all(r.value == 0.0 for r in at_ref)
        below = [r for r in rows if r.L < 256]
        assert any(r.value > 0 for r in below)

    def test_grid_beyond_reference_rejected(self):
        with pytest.raises(ValueError):
            run_projection_complexity(small_cfg("projection-complexity", l_ref=64, l_grid=(16, 128)))


class TestNoiseSweep:
    def test_sigma_zero_row_equals_plain_sliced_value(self):
        cfg = small_cfg("noise-sweep", sigmas=(0.0, 1.0), num_runs=1)
        rows = run_noise_sweep(cfg)
        row0 = next(r for r in rows if r.sigma == 0.0)
        # recompute the unsmoothed sliced value from the same streams
        root = RngRoot(cfg.seed)
        tag = f"ns/d{cfg.dimensions[0]}/n{cfg.sample_sizes[0]}/{cfg.pair}"
        X = derive_stream(root.child(f"{tag}/x", 0), "data", 0).normals(80 * 6).reshape(80, 6)
        Y = derive_stream(root.child(f"{tag}/y", 0), "data", 0).normals(80 * 6).reshape(80, 6)
        run_root = root.child(tag, 0)
        vals = []
        for l in range(cfg.num_projections):
            u = sample_direction(6, derive_stream(run_root, "proj", l))
            vals.append(wasserstein_pp(project(SampleSet(X), u), project(SampleSet(Y), u), 2))
        assert row0.value == float(np.mean(vals))

    def test_mmd_less_sensitive_to_noise_than_wasserstein(self):
        cfg = small_cfg(
            "noise-sweep",
            dimensions=(20,),
            sample_sizes=(500,),
            sigmas=(5.0, 15.0),
            num_runs=3,
            divergences=("swd", "mmd"),
            num_projections=32,
        )
        rows = run_noise_sweep(cfg)

        def mean_at(name, sigma):
            sel = [r.value for r in rows if r.divergence == name and r.sigma == sigma]
            return float(np.mean(sel))

        rel_swd = abs(mean_at("swd", 15.0) - mean_at("swd", 5.0)) / mean_at("swd", 5.0)
        rel_mmd = abs(mean_at("mmd", 15.0) - mean_at("mmd", 5.0)) / mean_at("mmd", 5.0)
        assert rel_mmd < rel_swd

    def test_pair_modes_change_data(self):
        same = run_noise_sweep(small_cfg("noise-sweep", num_runs=1))
        shifted = run_noise_sweep(small_cfg("noise-sweep", num_runs=1, pair="shifted"))
        assert shifted[0].value > same[0].value


class TestDisplacement:
    def test_argmin_at_two(self):
        cfg = small_cfg(
            "displacement",
            dimensions=(10,),
            sample_sizes=(128,),
            sigmas=(1.0,),
            num_runs=2,
            s_grid=(1.0, 1.5, 2.0, 2.5, 3.0),
            num_projections=24,
        )
        rows = run_displacement(cfg)
        assert len(rows) == 5 * 2
        curve = {}
        for r in rows:
            s = float(r.experiment.split("s=")[1].rstrip("]"))
            curve.setdefault(s, []).append(r.value)
        means = {s: np.mean(v) for s, v in curve.items()}
        argmin = min(means, key=means.get)
        assert abs(argmin - 2.0) <= 0.5

    def test_curve_symmetric_about_two_and_floor_positive(self):
        cfg = small_cfg(
            "displacement",
            dimensions=(50,),
            sample_sizes=(64,),
            sigmas=(3.0,),
            num_runs=3,
            s_grid=(0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0),
            num_projections=16,
        )
        rows = run_displacement(cfg)
        curve, ses = {}, {}
        for r in rows:
            s = float(r.experiment.split("s=")[1].rstrip("]"))
            curve.setdefault(s, []).append(r.value)
            ses.setdefault(s, []).append(r.std_error)
        means = {s: float(np.mean(v)) for s, v in curve.items()}
        for delta in (0.5, 1.0, 1.5, 2.0):
            tol = 2 * (np.mean(ses[2 - delta]) + np.mean(ses[2 + delta]))
            assert abs(means[2 - delta] - means[2 + delta]) <= tol
        # the plug-in estimate between finite noisy sets never reaches zero
        assert means[2.0] > 0.0


class TestTheoryContainment:
    def test_measured_error_stays_below_calibrated_envelope(self):
        # same-distribution toys: the population value is 0, so the estimate
        # itself is the error; the envelope is calibrated through c_p at the
        # smallest n and must stay above at larger n
        import math

        from gssd.bounds import (
            moments_spherical_gaussian,
            sample_bound,
            tail_spherical_gaussian,
            upsilon_constant,
            xi_constant,
        )

        d, sigma, p = 10, 3.0, 2
        xi = xi_constant(p, sigma, 2.0, tail_spherical_gaussian(d, 1.0))
        upsilon_unit = upsilon_constant(p, sigma, moments_spherical_gaussian(d), 1.0)
        ns = (200, 800, 3200)
        measured = {}
        for n in ns:
            vals = []
            for r in range(8):
                X = SampleSet(derive_stream(RngRoot(900 + r), f"tb-x/{n}", 0).normals(n * d).reshape(n, d))
                Y = SampleSet(derive_stream(RngRoot(950 + r), f"tb-y/{n}", 0).normals(n * d).reshape(n, d))
                cfg = GssdConfig(
                    sigma=sigma, num_projections=64, order=p,
                    divergence=DivergenceSpec("wasserstein", p=p), seed=RngRoot(1000 + r),
                )
                vals.append(estimate(X, Y, cfg).mean_pow)
            measured[n] = float(np.mean(vals))
        n0 = ns[0]
        c_cal = max(0.0, (measured[n0] - xi / math.sqrt(n0)) * n0 / math.log(n0) / upsilon_unit)
        ratios = []
        for n in ns:
            bound = sample_bound(n, xi, c_cal * upsilon_unit)
            assert measured[n] <= bound
            ratios.append(measured[n] / bound)
        # the measured curve decays at least as fast as the envelope
        assert all(a >= b for a, b in zip(ratios, ratios[1:]))


# ---------------------------------------------------------------- compare


class TestCompare:
    def _write_gaussian(self, path, seed, n, d, label="cmp"):
        z = derive_stream(RngRoot(seed), label, 0).normals(n * d).reshape(n, d)
        with open(path, "w") as fh:
            for row in z:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        return z

    def test_self_compare_sigma_zero_is_zero(self, tmp_path):
        f = tmp_path / "x.csv"
        self._write_gaussian(f, 5, 50, 4)
        cfg = small_cfg("compare", sigmas=(0.0,))
        report = compare(str(f), str(f), cfg)
        assert report["mean_pow"] == 0.0

    def test_dimension_mismatch_rejected(self, tmp_path):
        fx, fy = tmp_path / "x.csv", tmp_path / "y.csv"
        self._write_gaussian(fx, 5, 20, 4)
        self._write_gaussian(fy, 6, 20, 3)
        with pytest.raises(ValueError, match="dimension mismatch"):
            compare(str(fx), str(fy), small_cfg("compare"))

    def test_disjoint_halves_match_same_distribution_baseline(self, tmp_path):
        n, d = 400, 10
        z = self._write_gaussian(tmp_path / "all.csv", 7, 2 * n, d)
        fx, fy = tmp_path / "x.csv", tmp_path / "y.csv"
        for path, half in ((fx, z[:n]), (fy, z[n:])):
            with open(path, "w") as fh:
                for row in half:
                    fh.write(",".join(repr(float(v)) for v in row) + "\n")
        cfg = small_cfg("compare", dimensions=(d,), sample_sizes=(n,), sigmas=(1.0,), num_projections=48)
        report = compare(str(fx), str(fy), cfg)
        base_cfg = small_cfg(
            "sample-complexity", dimensions=(d,), sample_sizes=(n,), sigmas=(1.0,),
            num_runs=6, num_projections=48,
        )
        base_rows = run_sample_complexity(base_cfg)
        base_roots = [math.sqrt(r.value) for r in base_rows]
        spread = float(np.std(base_roots, ddof=1))
        assert abs(report["root"] - float(np.mean(base_roots))) <= 3 * (spread + report["std_error"])


# ---------------------------------------------------------------- csv output + cli


class TestCsvOutput:
    def test_header_and_determinism_modulo_wall(self, tmp_path):
        cfg = small_cfg("noise-sweep", sigmas=(0.0, 1.0), out=str(tmp_path / "a.csv"))
        rows = run_noise_sweep(cfg)
        write_rows_csv(cfg.out, cfg, rows)
        text = (tmp_path / "a.csv").read_text().splitlines()
        assert text[0] == "# seed = 42"
        assert text[1].startswith("# version = ")
        assert text[2].startswith("# config = ")
        assert text[3] == "experiment,divergence,d,n,sigma,L,run,value,std_error,wall_ms"
        # rerun: identical except the wall_ms column
        rows2 = run_noise_sweep(cfg)
        write_rows_csv(str(tmp_path / "b.csv"), cfg, rows2)
        a = (tmp_path / "a.csv").read_text().splitlines()
        b = (tmp_path / "b.csv").read_text().splitlines()
        strip = lambda lines: [",".join(ln.split(",")[:-1]) for ln in lines]
        assert strip(a) == strip(b)


class TestCli:
    def test_sample_complexity_command(self, tmp_path):
        out = tmp_path / "sc.csv"
        rc = cli_main([
            "sample-complexity", "--dim", "5", "--sizes", "40,80", "--sigmas", "1",
            "--runs", "2", "--projections", "8", "--div", "swd", "--seed", "7",
            "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "# seed = 7"
        assert len(lines) == 4 + 2 * 2

    def test_compare_command_json(self, tmp_path):
        f = tmp_path / "x.csv"
        z = derive_stream(RngRoot(1), "clicmp", 0).normals(30 * 3).reshape(30, 3)
        with open(f, "w") as fh:
            for row in z:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        out = tmp_path / "rep.json"
        rc = cli_main([
            "compare", str(f), str(f), "--sigmas", "0", "--projections", "8",
            "--div", "swd", "--out", str(out),
        ])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["mean_pow"] == 0.0
        assert report["seed"] != ""

    def test_bad_input_is_an_error_exit(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("1.0,2.0\n3.0\n")
        rc = cli_main(["compare", str(f), str(f), "--projections", "4"])
        assert rc == 2

    def test_workers_flag_reproduces_values(self, tmp_path):
        args = [
            "noise-sweep", "--dim", "6", "--sizes", "60", "--sigmas", "0,1",
            "--runs", "1", "--projections", "12", "--div", "swd", "--seed", "3",
        ]
        out1, out8 = tmp_path / "w1.csv", tmp_path / "w8.csv"
        assert cli_main(args + ["--workers", "1", "--out", str(out1)]) == 0
        assert cli_main(args + ["--workers", "8", "--out", str(out8)]) == 0
        strip = lambda p: [",".join(ln.split(",")[:-1]) for ln in p.read_text().splitlines()[3:]]
        assert strip(out1) == strip(out8)

    def test_all_commands_complete_on_reduced_grid(self, tmp_path):
        # CI stand-in for the desk-scale performance budget: every command
        # end-to-end on a small grid, well under the 10-minute envelope
        import time

        t0 = time.monotonic()
        common = ["--dim", "8", "--sizes", "60", "--runs", "2", "--projections", "8",
                  "--div", "swd,mmd,skd", "--sinkhorn-max-iter", "100", "--seed", "5"]
        assert cli_main(["sample-complexity", *common, "--sigmas", "1",
                         "--out", str(tmp_path / "sc.csv")]) == 0
        assert cli_main(["projection-complexity", *common, "--sigmas", "1",
                         "--l-ref", "64", "--l-grid", "8,16,64",
                         "--out", str(tmp_path / "pc.csv")]) == 0
        assert cli_main(["noise-sweep", *common, "--sigmas", "0,1,3",
                         "--out", str(tmp_path / "ns.csv")]) == 0
        assert cli_main(["displacement", *common, "--sigmas", "1", "--s-grid", "1,2,3",
                         "--out", str(tmp_path / "disp.csv")]) == 0
        assert time.monotonic() - t0 < 600
        for name in ("sc", "pc", "ns", "disp"):
            lines = (tmp_path / f"{name}.csv").read_text().splitlines()
            assert lines[0] == "# seed = 5"
            assert len(lines) > 4
