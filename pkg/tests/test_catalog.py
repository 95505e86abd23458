import pytest

from gcm_lab.errors import UnknownLabelError
from gcm_lab.services.catalog import LabelCatalog
from gcm_lab.services.presets import RunPresets
from gcm_lab.services.reports import ReportStore, dumps

catalog = LabelCatalog()


def test_every_family_member_kind_is_explained() -> None:
    for label in ("thimm(1,1)", "g(0,1)", "g_last(0)", "f(0,2)", "casimir(1)", "probe(j,n,n)"):
        entry = catalog.explain(label)
        assert entry.kind == "function"
        assert entry.formula and entry.description


def test_every_suite_is_explained() -> None:
    for suite in ("commute", "independence", "reduced", "patterns", "yangian"):
        assert catalog.explain(suite).kind == "suite"


def test_unknown_label_suggests_neighbours() -> None:
    with pytest.raises(UnknownLabelError) as exc:
        catalog.explain("thim(1,1)")
    assert "thimm" in exc.value.suggestions


def test_preset_overrides_map_lambda() -> None:
    config = RunPresets().build_config("desk-n2", lam=[-2.0, -5.0], trials=None)
    assert config.lam == [-2.0, -5.0]
    assert config.trials == 20
    with pytest.raises(ValueError):
        RunPresets().get_preset("missing")


def test_report_serialization_is_stable(tmp_path) -> None:
    payload = {"b": (1, 2), "a": {"z": 1.5, "y": None}}
    assert dumps(payload) == '{\n  "a": {\n    "y": null,\n    "z": 1.5\n  },\n  "b": [\n    1,\n    2\n  ]\n}\n'
    store = ReportStore(tmp_path)
    path = store.save("demo", payload)
    assert path.name == "demo.json"
    assert store.read("demo")["schema_version"] == 1
    assert store.read("absent") == {}


def test_explain_names_the_source_of_each_label() -> None:
    assert "Reduced-trace identity" in catalog.explain("f(0,1)").citation
    assert "corner circle action" in catalog.explain("g_last(0)").citation
    assert "every skew pairing factors" in catalog.explain("factorize").citation
    for label in catalog.known_labels():
        assert catalog.explain(label).citation
    rendered = catalog.render("f(0,1)")
    assert "source: Reduced-trace identity" in rendered
    assert "rtr(Y^{2m}" in rendered
