from chaoscycle.core.enums import ReconfigOpKind
from chaoscycle.core.records import ChangeSet
from chaoscycle.core.records import ReconfigOp
from chaoscycle.core.records import Reconfiguration
from chaoscycle.manifests.services.apply import apply_reconfiguration
from chaoscycle.manifests.services.diff import describe_changes
from chaoscycle.manifests.services.diff import diff_documents
from chaoscycle.manifests.services.diff import diff_manifest_sets
from chaoscycle.manifests.services.diff import reconfiguration_from_changeset


class TestDiffManifestSets:
    def test_identical_sets(self, nginx_set):
        assert diff_manifest_sets(nginx_set, nginx_set).is_empty

    def test_pod_to_deployment(self, nginx_set, resilient_set):
        changes = diff_manifest_sets(nginx_set, resilient_set)
        assert changes.added == ("Deployment.yml",)
        assert changes.removed == ("Pod.yml",)
        assert changes.modified == ()

    def test_modified_fields(self, nginx_set):
        restarting = nginx_set.texts["Pod.yml"].replace("restartPolicy: Never", "restartPolicy: Always")
        replace = ReconfigOp(op=ReconfigOpKind.REPLACE, path="Pod.yml", text=restarting)
        changes = diff_manifest_sets(nginx_set, apply_reconfiguration(nginx_set, Reconfiguration(ops=(replace,))))
        assert changes.added == changes.removed == ()
        [change] = changes.modified
        assert change.path == "Pod.yml"
        assert [(d.field, d.old, d.new) for d in change.differences] == [("spec.restartPolicy", "Never", "Always")]

    def test_changeset_replays_to_target(self, nginx_set, resilient_set):
        changes = diff_manifest_sets(nginx_set, resilient_set)
        rebuilt = apply_reconfiguration(nginx_set, reconfiguration_from_changeset(changes, resilient_set))
        assert rebuilt.structurally_equal(resilient_set)
        assert diff_manifest_sets(rebuilt, resilient_set).is_empty


def test_list_differences_use_indices():
    old = ({"spec": {"ports": [{"port": 80}]}},)
    new = ({"spec": {"ports": [{"port": 8080}, {"port": 443}]}},)
    fields = [d.field for d in diff_documents(old, new)]
    assert fields == ["spec.ports[0].port", "spec.ports[1]"]


def test_describe_changes(nginx_set, resilient_set):
    assert describe_changes(ChangeSet()) == "no changes"
    text = describe_changes(diff_manifest_sets(nginx_set, resilient_set))
    assert text.splitlines() == ["added Deployment.yml", "removed Pod.yml"]
