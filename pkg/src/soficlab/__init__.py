from soficlab.core import (
    Alphabet,
    IntegerGroup,
    Microstate,
    WindowDistribution,
    bernoulli_oracle,
    cyclic_model,
    kantorovich,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "IntegerGroup",
    "Microstate",
    "WindowDistribution",
    "__version__",
    "bernoulli_oracle",
    "cyclic_model",
    "kantorovich",
]


def repl():
    """Open IPython with soficlab preloaded.

    The namespace holds `np`, `pl`, `core` and every public name of the
    models, oracles, transport and microstates packages, so a model can be
    built and fitted without writing a config.
    """

    import IPython
    import numpy as np
    import polars as pl

    import soficlab.core as core
    from soficlab.core.microstates import __all__ as microstate_names
    from soficlab.core.models import __all__ as model_names
    from soficlab.core.oracles import __all__ as oracle_names
    from soficlab.core.transport import __all__ as transport_names

    print(
        r"""
------------------------------------------------

Welcome to
            __ _      _       _
  ___  ___ / _(_) ___| | __ _| |__
 / __|/ _ \ |_| |/ __| |/ _` | '_ \
 \__ \ (_) |  _| | (__| | (_| | |_) |
 |___/\___/|_| |_|\___|_|\__,_|_.__/
------------------------------------------------

"""
    )

    namespace = {"np": np, "pl": pl, "core": core}
    for module, names in [
        ("soficlab.core.models", model_names),
        ("soficlab.core.oracles", oracle_names),
        ("soficlab.core.transport", transport_names),
        ("soficlab.core.microstates", microstate_names),
    ]:
        imported = __import__(module, fromlist=list(names))
        namespace.update({name: getattr(imported, name) for name in names})

    IPython.start_ipython(
        colors="neutral",
        display_banner=False,
        user_ns=namespace,
        argv=[],
    )
