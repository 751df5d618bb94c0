import json

import pytest

from fbmarea.config import ConfigError, RunConfig, load_config, resolve


def test_flags_override_file():
    cfg = resolve({"schema": 1, "alpha": 0.15, "rho": 4, "lambda": 0.3}, {"rho": 6, "alpha": None})
    assert cfg.alpha == 0.15 and cfg.rho == 6 and cfg.lam == 0.3


def test_unknown_keys_become_params():
    cfg = resolve(None, {"replicas": 10, "params": {"n": 3}})
    assert cfg.params == {"replicas": 10, "n": 3}


def test_schema_required(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"alpha": 0.2}))
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text(json.dumps({"schema": 1, "alpha": 0.2}))
    assert load_config(p)["alpha"] == 0.2


@pytest.mark.parametrize("kw, flags", [
    ({"alpha": 0.5}, {}),
    ({"alpha": 0.3}, {"model": True}),
    ({"M": 1}, {}),
    ({"rho": -1}, {}),
    ({"threads": 0}, {}),
    ({}, {"stochastic": True}),
])
def test_validation_errors(kw, flags):
    with pytest.raises(ConfigError):
        RunConfig(**kw).validate(**flags)


def test_digest_ignores_output_path():
    a = RunConfig(seed=1, out="x.csv")
    b = RunConfig(seed=1, out="y.csv")
    assert a.digest() == b.digest()
    assert a.digest() != RunConfig(seed=2).digest()
