"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section of the pytest summary.
"""
import csv
import time
from decimal import Decimal

import numpy as np
import pytest

import oracles
from conftest import random_glyph
from walshocr import ann
from walshocr.cli import main
from walshocr.features import (
    closed_areas,
    feature_vector,
    load_database,
    wht_correlations,
)
from walshocr.pipeline import EvalReport, FontScore, recognize_page
from walshocr.wht import fwht1d, sequency_permutation

SIZES = [2, 4, 8, 16, 32, 64]


class TestAcceptance:
    def test_1_training_set_recognition(self, templates_dir, tmp_path, verdict):
        db_path, model_path = tmp_path / "db.json", tmp_path / "model.json"
        start = time.perf_counter()
        rc_build = main(["build-db", "--templates", str(templates_dir), "--out", str(db_path)])
        rc_train = main(["train", "--db", str(db_path), "--out", str(model_path), "--log-every", "0"])
        elapsed = time.perf_counter() - start
        db = load_database(db_path)
        model = ann.load_model(model_path)
        correct = sum(ann.classify(model, v)[0] == label for label, v in zip(db.labels, db.vectors))
        ok = rc_build == rc_train == 0 and correct == 36 and elapsed < 60
        verdict(1, ok, f"training set {correct}/36 in {elapsed:.2f} s (limit 60 s)")
        assert ok

    def test_2_fwht_matches_matrix(self, verdict):
        rng = np.random.default_rng(2)
        start = time.perf_counter()
        worst_dev = worst_inv = worst_parseval = 0.0
        for n in SIZES:
            h = oracles.hadamard_matrix(n)
            for _ in range(100):
                v = rng.normal(size=n)
                y = fwht1d(v)
                worst_dev = max(worst_dev, float(np.max(np.abs(y - h @ v))))
                worst_inv = max(worst_inv, float(np.max(np.abs(fwht1d(y) - v)) / np.max(np.abs(v))))
                worst_parseval = max(worst_parseval, abs(float(y @ y) - float(v @ v)) / float(v @ v))
        elapsed = time.perf_counter() - start
        ok = worst_dev <= 1e-9 and worst_inv <= 1e-9 and worst_parseval <= 1e-9 and elapsed < 5
        verdict(
            2,
            ok,
            f"max dev {worst_dev:.1e}, involution {worst_inv:.1e}, Parseval {worst_parseval:.1e} (tol 1e-9), {elapsed:.2f} s",
        )
        assert ok

    def test_3_sequency_sign_changes(self, verdict):
        bad = []
        for n in SIZES:
            h = oracles.hadamard_matrix(n)
            perm = sequency_permutation(n)
            bad += [(n, s) for s in range(n) if oracles.sign_changes(h[perm[s]]) != s]
        verdict(3, not bad, f"{sum(SIZES)} basis vectors checked, {len(bad)} mismatches")
        assert not bad

    def test_4_gradient_check(self, verdict):
        rng = np.random.default_rng(4)
        step = 1e-5
        worst = 0.0
        start = time.perf_counter()
        for point in range(20):
            config = ann.TrainConfig(hidden_count=5, seed=point)
            scaling = (np.zeros(11), np.full(11, 42.0))
            model = ann.init_mlp(config, scaling, [str(i) for i in range(36)])
            x = rng.uniform(0, 42, (1, 11))
            t = rng.uniform(0, 1, (1, 36))
            _, analytic = ann.gradients(model, x, t)
            for param, grad in zip(model.params(), analytic):
                flat, gflat = param.reshape(-1), grad.reshape(-1)
                for i in range(flat.size):
                    old = flat[i]
                    flat[i] = old + step
                    up = ann.sse(model, x, t)
                    flat[i] = old - step
                    down = ann.sse(model, x, t)
                    flat[i] = old
                    numeric = (up - down) / (2 * step)
                    rel = abs(gflat[i] - numeric) / max(abs(gflat[i]), abs(numeric), 1e-7)
                    worst = max(worst, rel)
        elapsed = time.perf_counter() - start
        ok = worst <= 1e-4 and elapsed < 10
        verdict(4, ok, f"11-5-36 at 20 points: worst relative error {worst:.1e} (tol 1e-4), {elapsed:.2f} s")
        assert ok

    def test_5_feature_oracles(self, db, verdict):
        rng = np.random.default_rng(5)
        glyphs = list(db.templates) + [random_glyph(rng) for _ in range(100)]
        mismatches = []
        worst_corr = 0.0
        for k, g in enumerate(glyphs):
            fv = feature_vector(g, db)
            pos, scores = oracles.wht_pos_naive(g, db.spectra)
            expected = {
                "h30": oracles.row_count(g, 0.3),
                "h50": oracles.row_count(g, 0.5),
                "h80": oracles.row_count(g, 0.8),
                "v30": oracles.col_count(g, 0.3),
                "v50": oracles.col_count(g, 0.5),
                "v80": oracles.col_count(g, 0.8),
                "pos": pos,
                "cc": oracles.holes_scipy(g),
            }
            mismatches += [(k, name) for name, value in expected.items() if getattr(fv, name) != value]
            corr = {"hsym": oracles.h_symmetry_loops(g), "vsym": oracles.v_symmetry_loops(g)}
            diffs = [abs(getattr(fv, name) - value) for name, value in corr.items()]
            diffs += list(np.abs(wht_correlations(g, db.spectra) - np.array(scores)))
            total = 0.0
            for name in ("h30", "h50", "h80", "v30", "v50", "v80"):
                total += expected[name]
            total = total + corr["hsym"] + corr["vsym"] + pos + expected["cc"]
            diffs.append(abs(fv.sumt - total))
            worst_corr = max(worst_corr, *diffs)
        anchors = {label: closed_areas(db.templates[db.index(label)]) for label in "8AH"}
        anchors_ok = anchors == {"8": 2, "A": 1, "H": 0}
        ok = not mismatches and worst_corr <= 1e-12 and anchors_ok
        verdict(
            5,
            ok,
            f"{len(glyphs)} glyphs: {len(mismatches)} integer mismatches, worst real deviation {worst_corr:.1e} (tol 1e-12), "
            f"holes 8={anchors['8']} A={anchors['A']} H={anchors['H']}",
        )
        assert ok, mismatches[:10]

    def test_6_eval_arithmetic(self, verdict):
        a = EvalReport(rows=[FontScore(f"f{i}", 30 + (i < 9), 36) for i in range(10)]).aggregate
        b = EvalReport(rows=[FontScore(f"f{i}", 27, 36) for i in range(20)]).aggregate
        last_a = EvalReport(rows=[FontScore("x", 309, 360)]).to_csv().splitlines()[-1]
        ok = (a.correct, a.total, a.rate) == (309, 360, Decimal("85.83")) and b.rate == Decimal("75.00")
        ok = ok and last_a == "ALL,309,360,85.83"
        verdict(6, ok, f"309/360 -> {a.rate}, 540/720 -> {b.rate}")
        assert ok

    def test_7_pipeline_invariance(self, db, model, verdict):
        padded = doubled = 0
        for label, tpl in zip(db.labels, db.templates):
            padded += recognize_page(np.pad(tpl, 7), model, db).lines == [label]
            doubled += recognize_page(np.kron(tpl, np.ones((2, 2), dtype=np.uint8)), model, db).lines == [label]
        ok = padded == doubled == 36
        verdict(7, ok, f"border padding {padded}/36, pixel doubling {doubled}/36")
        assert ok

    def test_8_variant_sets_report(self, templates_dir, fonts_dir, tmp_path, verdict):
        db_path, model_path, out = tmp_path / "db.json", tmp_path / "model.json", tmp_path / "eval.csv"
        main(["build-db", "--templates", str(templates_dir), "--out", str(db_path)])
        main(["train", "--db", str(db_path), "--out", str(model_path), "--log-every", "0"])
        rc = main(["eval", "--model", str(model_path), "--db", str(db_path), "--fonts", str(fonts_dir), "--out", str(out)])
        rows = list(csv.DictReader(out.read_text().splitlines()))
        summary = ", ".join(f"{r['font']} {r['correct']}/{r['total']} = {r['rate_percent']}%" for r in rows)
        ok = rc == 0 and {r["font"] for r in rows} == {"bold", "thin", "ALL"}
        verdict(8, ok, f"report only: {summary}")
        assert ok
