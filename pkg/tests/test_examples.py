"""End-to-end examples that run whole pipelines on generated data."""

import numpy as np
import pytest

from ellipsoid_ph.cli import main
from ellipsoid_ph.descriptors import loo_nn_classify, top_lifespans
from ellipsoid_ph.estimators import EllipsoidPersistence, RipsPersistence
from ellipsoid_ph.persistence import Barcode
from ellipsoid_ph.pointcloud import generate_disk_with_holes, generate_figure_eight

pytestmark = pytest.mark.slow


def lifespans(bc, cap, pad=4):
    return np.concatenate([bc.lifespans(1, cap), np.zeros(pad)])


def test_figure_eight_rips_two_dominant_bars():
    bc = RipsPersistence(rmax=0.6).fit().barcode(generate_figure_eight(200, 1.0))
    life = lifespans(bc, 0.6)
    assert life[1] > 0 and life[1] >= 3 * life[2]


def test_dog_bone_through_cli(tmp_path):
    cloud, e, r = tmp_path / "bone.csv", tmp_path / "e.tsv", tmp_path / "r.tsv"
    assert main(["generate", "dogbone", "--n", "200", "--out", str(cloud)]) == 0
    assert main(["barcode", str(cloud), "--q", "3", "--k", "5", "--rmax", "1.75", "--out", str(e)]) == 0
    assert main(["barcode", str(cloud), "--complex", "rips", "--rmax", "1.75", "--out", str(r)]) == 0
    el = lifespans(Barcode.from_tsv(e), 1.75)
    rl = lifespans(Barcode.from_tsv(r), 1.75)
    assert el[0] >= 3 * el[1]
    assert rl[1] >= 2 * rl[2] and rl[1] > 0


@pytest.mark.xfail(strict=True, reason="with 0.18-radius holes the ellipsoid H1 barcode at n=301 shows no "
                                       "two-bar gap; see the decisions ledger")
def test_two_holes_give_two_dominant_ellipsoid_bars():
    bc = EllipsoidPersistence(k=5, q=3.0, rmax=0.4).fit().barcode(generate_disk_with_holes(301, 2, seed=0))
    life = lifespans(bc, 0.4)
    assert life[1] >= 3 * life[2]


@pytest.mark.xfail(strict=True, reason="holes 0 vs 1 at n=100 classify near chance for both pipelines; "
                                       "see the decisions ledger")
def test_zero_vs_one_hole_classification():
    accs = []
    for run in range(5):
        clouds, labels = [], []
        for h in (0, 1):
            for i in range(5):
                clouds.append(generate_disk_with_holes(100, h, seed=1_000_000 * run + 1000 * h + i))
                labels.append(h)
        est = EllipsoidPersistence(k=5, q=3.0, rmax=0.6).fit()
        sigs = [top_lifespans(b, (0, 1), 10, 0.6) for b in est.transform(clouds)]
        accs.append(loo_nn_classify(sigs, labels))
    assert np.mean(accs) >= 0.8
