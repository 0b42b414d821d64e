import pytest

from darwinlab import suites


class TestSuiteMachinery:
    def test_algebra_suite_passes(self):
        rep = suites.suite_algebra()
        assert rep.passed
        names = [c.name for c in rep.checks]
        assert "matrix_identities" in names and "projected_spin_commutators" in names

    def test_algebra_suite_deterministic(self):
        a = suites.suite_algebra(seed=5)
        b = suites.suite_algebra(seed=5)
        assert [c.value for c in a.checks] == [c.value for c in b.checks]

    def test_run_suites_rejects_unknown(self, helicity_state):
        with pytest.raises(ValueError, match="available"):
            suites.run_suites(["algebra", "spectra"], helicity_state)

    def test_tolerance_override(self, helicity_state):
        rep = suites.suite_constraint(helicity_state, tolerances={"transversality": 1e-30})
        assert not rep.passed
        failing = [c for c in rep.checks if not c.passed]
        assert failing[0].name == "transversality"

    def test_full_run_on_state(self, two_direction_state):
        names = ["constraint", "spin-equalities", "probability", "densities"]
        reports = suites.run_suites(names, two_direction_state)
        assert [r.suite for r in reports] == names
        assert all(r.passed for r in reports)

    def test_informational_checks_never_fail(self, two_direction_state):
        rep = suites.suite_densities(two_direction_state)
        gaps = [c for c in rep.checks if c.tolerance is None]
        assert gaps and all(c.passed for c in gaps)
