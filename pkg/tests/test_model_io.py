import pytest

from sgf.config import RunConfig, build_model
from sgf.errors import SGFError
from sgf.events import SyntheticGestureSpec, gen_synthetic
from sgf.model_io import load_model, save_model
from sgf.network import online_learn


def _small_trained_model():
    model = build_model(RunConfig())
    samples = []
    for cid, kind in ((3, "oscillate-small-area"), (9, "linear-down"),
                      (4, "circular-cw"), (5, "circular-ccw")):
        spec = SyntheticGestureSpec(
            kind,
            center=(100, 44) if cid == 3 else None,
            amplitude=22 if cid in (4, 5) else None,
        )
        for k in range(2):
            samples.append((gen_synthetic(spec, 500 + 10 * cid + k), cid))
    return online_learn(samples, model)


def test_save_requires_finalized():
    model = build_model(RunConfig())
    with pytest.raises(SGFError):
        save_model(model)


def test_round_trip_preserves_everything():
    model = _small_trained_model()
    text = save_model(model)
    again = load_model(text)
    assert again.similarity == model.similarity
    assert again.geometry == model.geometry
    assert again.spikes_per_frame == model.spikes_per_frame
    for unit_id, unit in model.units.items():
        loaded = again.units[unit_id]
        assert loaded.slot_ids() == unit.slot_ids()
        assert loaded.st_params == unit.st_params
        assert loaded.targets == unit.targets
        assert set(loaded.outputs) == set(unit.outputs)
        for label, out in unit.outputs.items():
            got = loaded.outputs[label]
            assert [n.vector for n in got.neurons] == [
                n.vector for n in out.neurons
            ]
            assert [n.histogram for n in got.neurons] == [
                n.histogram for n in out.neurons
            ]
            assert got.weights == pytest.approx(out.weights, abs=1e-15)


def test_round_trip_preserves_inference():
    model = _small_trained_model()
    again = load_model(save_model(model))
    spec = SyntheticGestureSpec("linear-down")
    stream = gen_synthetic(spec, 999)
    assert (
        model.classify_stream(stream).predicted
        == again.classify_stream(stream).predicted
    )


def test_save_is_deterministic_text():
    model = _small_trained_model()
    assert save_model(model) == save_model(model)
    assert save_model(model).startswith("sgf-model v1\n")


def test_load_rejects_garbage():
    with pytest.raises(SGFError):
        load_model("not a model file\n")
    with pytest.raises(SGFError):
        load_model("sgf-model v1\nwat 3\n")
