"""Quick end-to-end check of the dmdclust Python bindings.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import cmath
import json

import dmdclust as dc


def check_dmd():
    series = dc.synthesize([1.0, 0.5j], [0.9, cmath.rect(0.95, 0.7)], 30)
    dec = dc.dmd_decompose(series, d=10, verify_pencil=True)
    assert dec.rank == 2, dec
    assert min(abs(z - 0.9) for z in dec.eigenvalues) < 1e-8
    assert dec.reconstruction_error < 1e-8
    assert dec.similarity_residual < 1e-10
    pen = dc.pencil_decompose(series, d=10)
    assert min(abs(z - cmath.rect(0.95, 0.7)) for z in pen.eigenvalues) < 1e-8
    print("dmd/pencil ok:", [round(abs(z), 6) for z in dec.eigenvalues])


def check_toy_clustering():
    ens = dc.SeriesEnsemble.toy(seed=0, sigma=0.0)
    assert len(ens) == 23 and ens.samples == 20
    model, feats = dc.fit_features(ens, d=19, rank=8)
    assert model.rank == 8 and len(feats) == 23
    labels = dc.ward(feats, 3)
    ari = dc.adjusted_rand_index(labels, ens.labels)
    assert ari == 1.0, ari
    again = dc.FeatureModel.from_json(model.to_json())
    emb = again.embed(ens.series[0][: again.d])
    assert max(abs(a - b) for a, b in zip(emb, feats[0])) < 1e-10
    merges = dc.ward_dendrogram(feats)
    assert len(merges) == 22
    print("toy clustering ok: ARI", ari)


def check_errors():
    try:
        dc.dmd_decompose([0.0] * 8, d=3)
    except ArithmeticError as e:
        print("zero data rejected:", e)
    else:
        raise AssertionError("zero data accepted")
    try:
        dc.fit_features(dc.SeriesEnsemble.toy(), d=19, rank=3, energy=0.9)
    except ValueError:
        pass
    else:
        raise AssertionError("conflicting policies accepted")


def check_image():
    pixels, regions = dc.lattice_image(width=64, height=64, seed=1, d=20)
    labels = dc.cluster_image(pixels, 64, 64, k=2, d=20)
    assert len(labels) == 64 * 64
    assert set(labels) == {0, 1, 2}
    print("image ok:", json.dumps({"regions": max(regions), "labels": max(labels)}))


if __name__ == "__main__":
    check_dmd()
    check_toy_clustering()
    check_errors()
    check_image()
    print("smoke test passed")
