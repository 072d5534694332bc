import IPython

import soficlab
from soficlab.core.models import cyclic_model
from soficlab.core.transport import kantorovich


class TestRepl:
    def test_namespace(self, monkeypatch, capsys):
        seen = {}
        monkeypatch.setattr(IPython, "start_ipython", lambda **kwargs: seen.update(kwargs))
        soficlab.repl()
        namespace = seen["user_ns"]
        assert namespace["cyclic_model"] is cyclic_model
        assert namespace["kantorovich"] is kantorovich
        assert {"np", "pl", "core", "Microstate", "bernoulli_oracle"} <= namespace.keys()
        assert seen["argv"] == []
        assert "Welcome to" in capsys.readouterr().out
