"""Cross-route consistency: the combinatorial checkers against the exact LP.

The LP over the polymatroid cone decides, independently of the graph and
cover machinery, whether a finite approximation factor exists and what the
least one is.  Both certified checkers must agree with it exactly.
"""

import itertools
import random
from fractions import Fraction

from cirelax import (
    CISet,
    CITriple,
    UNBOUNDED,
    check_ai_gamma,
    check_marginal,
    check_recursive,
    optimal_lambda,
    recursive_basis,
)

from helpers import (
    all_canonical_triples,
    all_dags,
    random_dag,
    random_marginal_set,
    random_triple,
)


class TestRecursiveVersusLP:
    def test_exhaustive_n3(self):
        """Separation holds exactly when the factor-1 bound holds over the
        whole cone, for every DAG and every triple on three variables."""
        triples = all_canonical_triples(3)
        for dag in all_dags(3):
            basis = recursive_basis(dag)
            for tau in triples:
                implied = check_recursive(dag, tau).implied
                assert implied == check_ai_gamma(basis, tau, Fraction(1), 3), (
                    dag,
                    tau,
                )

    def test_sampled_n4(self):
        rng = random.Random(211)
        for trial in range(12):
            dag = random_dag(4, rng)
            basis = recursive_basis(dag)
            for _ in range(6):
                tau = random_triple(4, rng)
                implied = check_recursive(dag, tau).implied
                assert implied == check_ai_gamma(basis, tau, Fraction(1), 4), (
                    dag,
                    tau,
                )

    def test_implied_lambda_star_never_exceeds_one(self):
        rng = random.Random(223)
        found = 0
        while found < 25:
            n = rng.randrange(2, 5)
            dag = random_dag(n, rng)
            tau = random_triple(n, rng)
            if not check_recursive(dag, tau).implied:
                continue
            found += 1
            lam = optimal_lambda(recursive_basis(dag), tau, n)
            assert lam is not UNBOUNDED and lam <= 1


class TestMarginalVersusLP:
    @staticmethod
    def marginal_triples(n):
        return [t for t in all_canonical_triples(n) if not t.z]

    def test_exhaustive_n3(self):
        """The cover criterion matches LP feasibility for every marginal
        antecedent set of size at most two and every consequent."""
        triples = all_canonical_triples(3)
        marginals = self.marginal_triples(3)
        subsets = [(t,) for t in marginals]
        subsets += list(itertools.combinations(marginals, 2))
        for subset in subsets:
            sigma = CISet(subset)
            for tau in triples:
                cert = check_marginal(sigma, tau, 3)
                lam = optimal_lambda(sigma, tau, 3)
                assert cert.implied == (lam is not UNBOUNDED), (sigma, tau, lam)
                if cert.implied:
                    assert lam <= cert.lam, (sigma, tau, lam, cert.lam)

    def test_sampled_n4(self):
        rng = random.Random(227)
        for trial in range(60):
            sigma = random_marginal_set(4, rng, rng.randrange(1, 4))
            tau = random_triple(4, rng)
            cert = check_marginal(sigma, tau, 4)
            lam = optimal_lambda(sigma, tau, 4)
            assert cert.implied == (lam is not UNBOUNDED), (sigma, tau, lam)
            if cert.implied:
                assert lam <= cert.lam


class TestNegativeVerdictsAlwaysCertify:
    """Every negative recursive verdict must construct a refutation; the
    fallback network search has to cover whatever the parity search cannot.
    Exhaustive over all three-variable DAGs and triples, sampled at four."""

    def test_exhaustive_n3(self):
        for dag in all_dags(3):
            for tau in all_canonical_triples(3):
                cert = check_recursive(dag, tau)
                if not cert.implied:
                    assert cert.refutation_table is not None

    def test_sampled_n4(self):
        rng = random.Random(229)
        kinds = set()
        for trial in range(120):
            dag = random_dag(4, rng)
            tau = random_triple(4, rng)
            cert = check_recursive(dag, tau)
            if not cert.implied:
                kinds.add(cert.refutation_kind)
                assert cert.refutation_table is not None
        assert "single-atom" in kinds
