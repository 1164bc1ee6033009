"""Quick end-to-end check of the Python bindings.

Build and install first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/ontoembed_py-*.whl
    python python/smoke_test.py
"""

import math
import os
import tempfile

import ontoembed_py as oe

NS = "http://example.org/smoke/"

ONTOLOGY = f"""Prefix(:=<{NS}>)
Prefix(rdfs:=<http://www.w3.org/2000/01/rdf-schema#>)
Ontology(<{NS}onto>
Declaration(Class(:Root))
Declaration(Class(:Binding))
Declaration(Class(:IonBinding))
Declaration(Class(:Transport))
SubClassOf(:Binding :Root)
SubClassOf(:IonBinding :Binding)
SubClassOf(:Transport :Root)
AnnotationAssertion(rdfs:label :IonBinding "ion binding")
AnnotationAssertion(rdfs:label :Transport "membrane transport")
)
"""


def main():
    kb = oe.KnowledgeBase.parse(ONTOLOGY)
    assert len(kb.classes) == 4, kb
    closure = kb.saturate()
    supers = set(closure.superclasses(NS + "IonBinding"))
    assert supers == {NS + "IonBinding", NS + "Binding", NS + "Root"}, supers
    assert closure.n_inferred == 1

    corpus = kb.corpus(closure)
    assert len(corpus) == kb.n_logical_axioms + closure.n_inferred + kb.n_annotation_axioms

    model = oe.EmbeddingModel.train(corpus, size=16, iter=20, seed=3)
    assert NS + "IonBinding" in model and model.dim == 16
    v = model.vector(NS + "IonBinding")
    assert len(v) == 16 and all(math.isfinite(x) for x in v)
    assert abs(oe.cosine(v, v) - 1.0) < 1e-12

    extra = oe.Corpus.from_lines(["ion channel transport", "ion binding site"])
    continued = oe.EmbeddingModel.train(extra, size=16, iter=2, seed=3, init=model)
    assert "channel" in continued and len(continued) > len(model)

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "m.model")
        model.save(path)
        loaded = oe.EmbeddingModel.load(path)
        assert loaded.vector(NS + "IonBinding") == v

    sim = oe.SemanticSimilarity(
        closure,
        {
            NS + "p1": [NS + "IonBinding"],
            NS + "p2": [NS + "Binding"],
            NS + "p3": [NS + "Transport"],
        },
    )
    assert abs(sim.ic(NS + "Binding") - math.log(3 / 2)) < 1e-12
    assert sim.ic(NS + "Root") == 0.0
    assert sim.resnik(NS + "IonBinding", NS + "Transport") == 0.0
    assert sim.bma(NS + "p1", NS + "p2") > sim.bma(NS + "p1", NS + "p3")

    assert oe.auc([0.9, 0.8, 0.2], [True, True, False]) == 1.0
    points, area = oe.roc_curve([0.9, 0.5, 0.5, 0.1], [True, False, True, False])
    assert points[0] == (0.0, 0.0) and points[-1] == (1.0, 1.0) and area == 0.875

    a, b, c = NS + "IonBinding", NS + "Binding", NS + "Transport"
    clf = oe.PairClassifier.train(model, [(a, b, True), (a, c, False)], hidden=[8], epochs=50, seed=2)
    s = clf.score(model, a, b)
    assert 0.0 <= s <= 1.0
    print("smoke test ok")


if __name__ == "__main__":
    main()
