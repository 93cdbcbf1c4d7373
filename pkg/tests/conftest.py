import numpy as np
import pytest

from poolruin import claims, model


@pytest.fixture
def m1_model():
    """One client, unit rates, Exp(1) claim: the hand-solvable reference."""
    return model.ModelSpec(
        m=1,
        lambda_circ=(1.0,),
        claims=(claims.Exponential(1.0),),
        regimes=(model.drift(1.0), model.drift(1.0)),
    )


def random_drift_model(rng: np.random.Generator, m_max: int = 6) -> model.ModelSpec:
    m = int(rng.integers(1, m_max + 1))
    laws = []
    for _ in range(m):
        if rng.random() < 0.5:
            laws.append(claims.Exponential(float(rng.uniform(0.2, 3.0))))
        else:
            laws.append(
                claims.Erlang(int(rng.integers(1, 4)), float(rng.uniform(0.2, 3.0)))
            )
    return model.ModelSpec(
        m=m,
        lambda_circ=tuple(rng.uniform(0.1, 5.0, m)),
        claims=tuple(laws),
        regimes=tuple(model.drift(float(r)) for r in rng.uniform(0.1, 5.0, m + 1)),
    )
