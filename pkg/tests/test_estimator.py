import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from finlang import corpus
from finlang.estimator import FinitenessClassifier
from finlang.validation import check_positive, check_scheme, check_term, check_terms

ENTRIES = corpus.entries()


def test_fit_predict_score():
    X = [e.text for e in ENTRIES]
    y = [e.expected for e in ENTRIES]
    clf = FinitenessClassifier().fit(X, y)
    assert list(clf.classes_) == ["FINITE", "INFINITE"]
    assert list(clf.predict(X)) == y
    assert clf.score(X, y) == 1.0
    proba = clf.predict_proba(X[:2])
    assert proba.shape == (2, 2) and np.all(proba.sum(axis=1) == 1)


def test_accepts_terms_and_schemes(reference_terms):
    clf = FinitenessClassifier(threads=2).fit([reference_terms["p1"]])
    assert list(clf.predict([reference_terms["p1"], corpus.entry("p3").scheme])) == ["INFINITE", "FINITE"]
    assert clf.verdicts_[0].witness is not None


def test_params_and_clone():
    clf = FinitenessClassifier(budget=10_000)
    assert clf.get_params() == {"budget": 10_000, "threads": 1}
    assert clone(clf).get_params() == clf.get_params()


def test_errors():
    with pytest.raises(NotFittedError):
        FinitenessClassifier().predict([corpus.entry("leaf").text])
    with pytest.raises(ValueError):
        FinitenessClassifier(threads=0).fit([corpus.entry("leaf").text])
    with pytest.raises(ValueError):
        FinitenessClassifier().fit([corpus.entry("leaf").text], ["MAYBE"])
    with pytest.raises(ValueError):
        FinitenessClassifier().fit([corpus.entry("leaf").text], ["FINITE", "FINITE"])


def test_validation_helpers(reference_terms, lam_a, tmp_path):
    path = tmp_path / "p1.hors"
    path.write_text(corpus.entry("p1").text)
    assert check_term(path) == reference_terms["p1"]
    assert check_scheme(corpus.entry("p1").scheme).start == "S"
    with pytest.raises(ValueError):
        check_term(lam_a)
    assert check_term(lam_a, ground=False) is lam_a
    with pytest.raises(TypeError):
        check_terms("S = e")
    with pytest.raises(TypeError):
        check_scheme(42)
    with pytest.raises(ValueError):
        check_positive("fuel", 0)
    assert check_positive("budget", None, allow_none=True) is None
