import numpy as np
import pytest

from harris.scenario import Scenario


@pytest.fixture
def tiny_scenario():
    """Six instances, three algorithms, two features; instance 4 unsolved."""
    performances = np.array([
        [10.0, 50.0, 90.0],
        [20.0, 40.0, 100.0],
        [95.0, 15.0, 80.0],
        [100.0, 25.0, 70.0],
        [100.0, 100.0, 100.0],
        [30.0, 60.0, 12.0],
    ])
    run_ok = np.array([
        [True, True, True],
        [True, True, False],
        [False, True, True],
        [False, True, True],
        [False, False, False],
        [True, True, True],
    ])
    return Scenario(
        name="tiny",
        algorithm_names=("a0", "a1", "a2"),
        feature_names=("f0", "f1"),
        features=np.array([
            [0.1, 1.0],
            [0.2, np.nan],
            [0.8, 3.0],
            [0.9, 4.0],
            [0.5, 5.0],
            [0.3, 6.0],
        ]),
        performances=performances,
        run_ok=run_ok,
        cutoff=100.0,
        fold_of=np.array([1, 2, 1, 2, 1, 2]),
        instance_ids=tuple(f"i{n}" for n in range(6)),
    )


DESCRIPTION = """\
scenario_id: demo
performance_measures: runtime
performance_type: runtime
maximize: false
algorithm_cutoff_time: 100
algorithms_deterministic: solver_a,solver_b
"""

FEATURES = """\
@relation demo_features
@attribute instance_id string
@attribute repetition numeric
@attribute width numeric
@attribute height numeric
@data
inst1,1,1.0,10.0
inst2,1,2.0,?
inst3,1,3.0,30.0
"""

RUNS = """\
@relation demo_runs
@attribute instance_id string
@attribute repetition numeric
@attribute algorithm string
@attribute runtime numeric
@attribute runstatus {ok,timeout,memout}
@data
inst1,1,solver_a,5.0,ok
inst1,1,solver_b,50.0,ok
inst2,1,solver_a,100.0,timeout
inst2,1,solver_b,7.5,ok
inst3,1,solver_a,100.0,timeout
inst3,1,solver_b,100.0,timeout
"""

CV = """\
@relation demo_cv
@attribute instance_id string
@attribute repetition numeric
@attribute fold numeric
@data
inst1,1,1
inst2,1,2
inst3,1,3
"""


@pytest.fixture
def aslib_dir_factory(tmp_path):
    """Write a small ASLib-style directory, with optional file overrides."""

    def make(description=DESCRIPTION, features=FEATURES, runs=RUNS, cv=CV,
             omit=()):
        root = tmp_path / "demo"
        root.mkdir(exist_ok=True)
        contents = {
            "description.txt": description,
            "feature_values.arff": features,
            "algorithm_runs.arff": runs,
            "cv.arff": cv,
        }
        for fname, text in contents.items():
            target = root / fname
            if fname in omit:
                if target.exists():
                    target.unlink()
                continue
            target.write_text(text, encoding="utf-8")
        return root

    return make
