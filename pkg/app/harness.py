"""Sampling harnesses: the component-bound sweep and the perturbation smoke check."""
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from app.classify import classify
from app.constructions import cone_sample, flip_permutations, sample_flip_permutation
from app.errors import DynamicalError, HarnessFailure
from app.iet import SignedPermutation, build_iet
from app.models import CapsConfig, Component, HarnessConfig, HarnessReport, PerturbationReport, TrialResult
from app.orbits import support_distance
from app.scalar import Scalar

logger = logging.getLogger(__name__)

PERTURBATION_RESOLUTION = 10**6

# (index, perm entries, length seed)
Job = Tuple[int, Tuple[int, ...], str]


def _classify_trial(
    index: int, perm: SignedPermutation, lengths: Sequence[Scalar], caps: CapsConfig
) -> Tuple[TrialResult, list]:
    try:
        report = classify(lengths, perm, caps, enforce_bound=False)
    except DynamicalError as exc:
        logger.warning("Trial %d on %s did not terminate: %s", index, perm, exc)
        logger.debug("Full exception details:", exc_info=True)
        return (
            TrialResult(
                index=index,
                perm=perm.to_list(),
                success=False,
                error=type(exc).__name__,
                error_message=str(exc),
            ),
            [],
        )
    return (
        TrialResult(
            index=index,
            perm=perm.to_list(),
            n_per=report.n_per,
            n_min=report.n_min,
            flipped_periodic=sum(1 for c in report.periodic if c.flipped),
        ),
        report.components,
    )


def _run_job(args: Tuple[Job, CapsConfig]) -> TrialResult:
    (index, entries, length_seed), caps = args
    perm = SignedPermutation(entries)
    lengths = cone_sample(perm, "", seed=length_seed)
    return _classify_trial(index, perm, lengths, caps)[0]


def _run_perturb_job(
    args: Tuple[int, Tuple[int, ...], Tuple[Scalar, ...], CapsConfig]
) -> Tuple[TrialResult, list]:
    index, entries, lengths, caps = args
    return _classify_trial(index, SignedPermutation(entries), lengths, caps)


def _hausdorff(x: list, y: list) -> Scalar:
    return max(support_distance(x, y), support_distance(y, x))


class HarnessRunner:
    """Runs classification trials; a failed trial is recorded, never raised."""

    def __init__(self, config: HarnessConfig, caps: Optional[CapsConfig] = None) -> None:
        self.config = config
        base = caps or CapsConfig()
        self.caps = CapsConfig(
            rauzy_cap=config.rauzy_cap,
            recursion_cap=base.recursion_cap,
            orbit_cap=config.orbit_cap,
            keane_depth=base.keane_depth,
            partition_depth=base.partition_depth,
        )

    # ------------------------------------------------------------------
    # Component bound sweep
    # ------------------------------------------------------------------

    def jobs(self) -> List[Job]:
        cfg = self.config
        if cfg.exhaustive:
            perms = flip_permutations(cfg.n)
            return [
                (i * cfg.sample_count + s, p.entries, f"{cfg.seed}:{i}:{s}")
                for i, p in enumerate(perms)
                for s in range(cfg.sample_count)
            ]
        jobs = []
        for index in range(cfg.sample_count):
            rng = random.Random(f"{cfg.seed}:{index}")
            jobs.append((index, sample_flip_permutation(cfg.n, rng).entries, f"{cfg.seed}:{index}"))
        return jobs

    def verify(self) -> HarnessReport:
        """Classify sampled flipped IETs and check every terminating sample.

        Raises HarnessFailure (carrying the report) when a terminating sample
        breaks the component bound or has no flipped periodic component.
        """
        cfg = self.config
        jobs = self.jobs()
        logger.info(
            "Verifying n=%d: %d trials (seed=%d, workers=%d)", cfg.n, len(jobs), cfg.seed, cfg.workers
        )
        args = [(job, self.caps) for job in jobs]
        if cfg.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                trials = list(pool.map(_run_job, args))
        else:
            trials = [_run_job(arg) for arg in args]

        report = HarnessReport(n=cfg.n, trials=sorted(trials, key=lambda t: t.index))
        logger.info(
            "Verify complete: %d/%d terminated, ties=%d caps=%d degenerate=%d",
            len(report.terminated),
            report.samples,
            report.tie_count,
            report.cap_count,
            report.degenerate_count,
        )
        if report.violations:
            logger.error(
                "Invariant violations: bound=%d nper_zero=%d full_periodic=%d",
                report.bound_violations,
                report.nper_zero_with_flips,
                report.full_periodic_violations,
            )
            failure = HarnessFailure(f"{report.violations} terminating samples violate an invariant")
            failure.report = report
            raise failure
        return report

    # ------------------------------------------------------------------
    # Perturbation smoke check
    # ------------------------------------------------------------------

    @staticmethod
    def perturbed_lengths(
        lengths: Sequence[Scalar], magnitude: Fraction, rng: random.Random
    ) -> Tuple[Scalar, ...]:
        perturbed = []
        for length in lengths:
            u = Fraction(rng.randint(0, PERTURBATION_RESOLUTION), PERTURBATION_RESOLUTION)
            perturbed.append(length * (1 + magnitude * (2 * u - 1)))
        return tuple(perturbed)

    def perturb(
        self,
        lengths: Sequence[Scalar],
        perm: SignedPermutation,
        magnitude: Optional[Fraction] = None,
        trials: Optional[int] = None,
    ) -> PerturbationReport:
        """Classify perturbed copies of (lengths, perm) and compare supports.

        Errors classifying the unperturbed input propagate.
        """
        magnitude = Fraction(self.config.perturbation_magnitude if magnitude is None else magnitude)
        trials = self.config.trials if trials is None else trials
        T = build_iet(lengths, perm)
        base = classify(T.lengths, perm, self.caps)
        logger.info("Perturbing %s (%s): %d trials, magnitude %s", perm, base.summary, trials, magnitude)

        report = PerturbationReport(
            base_n_per=base.n_per, base_n_min=base.n_min, magnitude=magnitude, total=T.total
        )
        args = [
            (
                t,
                perm.entries,
                self.perturbed_lengths(T.lengths, magnitude, random.Random(f"{self.config.seed}:perturb:{t}")),
                self.caps,
            )
            for t in range(trials)
        ]
        if self.config.workers > 1 and trials > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                results = list(pool.map(_run_perturb_job, args))
        else:
            results = [_run_perturb_job(arg) for arg in args]

        for trial, components in results:
            report.trials.append(trial)
            rho = self._max_matched_distance(base.components, components)
            if rho is not None and (report.max_rho is None or rho > report.max_rho):
                report.max_rho = rho

        logger.info("Perturbation complete: %d/%d preserved the profile", report.preserved, trials)
        return report

    @staticmethod
    def _max_matched_distance(
        base: Sequence[Component], perturbed: Sequence[Component]
    ) -> Optional[Scalar]:
        worst = None
        for component in base:
            candidates = [
                _hausdorff(component.support, other.support)
                for other in perturbed
                if other.kind == component.kind
            ]
            if not candidates:
                continue
            best = min(candidates)
            if worst is None or best > worst:
                worst = best
        return worst
