import pytest

from chaoscycle.core.loaders import build_manifest_set
from chaoscycle.core.resources import ManifestSet
from chaoscycle.simulator.services import engine
from chaoscycle.simulator.state import ClusterState

RESTARTING_POD = """\
apiVersion: v1
kind: Pod
metadata:
  name: worker
  labels:
    app: worker
spec:
  containers:
    - name: worker
      image: busybox
"""

ORPHAN_SERVICE = """\
apiVersion: v1
kind: Service
metadata:
  name: orphan
spec:
  selector:
    app: nobody
  ports:
    - port: 8080
"""


def settled(manifest_set: ManifestSet, seed: int = 0) -> ClusterState:
    state, _ = engine.deploy(manifest_set, seed)
    state, _ = engine.step(state, state.timing.pod_startup_delay_s)
    return state


@pytest.fixture
def restarting_set() -> ManifestSet:
    return build_manifest_set([("worker.yml", RESTARTING_POD)], "")


@pytest.fixture
def orphan_set() -> ManifestSet:
    return build_manifest_set([("worker.yml", RESTARTING_POD), ("orphan.yml", ORPHAN_SERVICE)], "")
