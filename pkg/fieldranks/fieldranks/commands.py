# Copyright (c) 2024 Contributors
# All rights reserved.

"""One pipeline per command: load the input, compute, emit the report.

Modes on the command line are 1-based; the library is 0-based, so every
stage converts on the way in and reports 1-based modes on the way out.
"""

import itertools
import logging
import math
import pathlib
import time
from argparse import Namespace
from dataclasses import dataclass

import msgspec
import numpy as np

from .analytic import (ARExact, analytic_rank_char, analytic_rank_zero_count, geometric_rank_estimate,
                       matmul_pair_count, stability_check)
from .constructions import (interp_decomp, poly_monotonicity_check, pushforward_to_extension,
                            subrank_cert_interpolation, tw_tensor)
from .errors import GuardExceeded, InconclusiveEstimate, InequalityViolation, VerificationFailed
from .gf import field_of_order
from .reports import PrintReport, Report, WriteReport, decimal, input_digest
from .search import (cp_rank, extension_pr_sandwich, flatten_ranks, partition_rank, slice_rank, sr_k_subspace,
                     sr_subspace, subrank_at_least)
from .settings import DEFAULT_SETTINGS, Settings
from .stages import Pipeline, Stage
from .subspace import TensorSubspace, decode_basis, to_basis_document
from .tensor import (MatrixTuple, Tensor, apply_matrices, decode_tensor, direct_sum, matmul_tensor, random_tensor,
                     to_document)

logger = logging.getLogger(__name__)

GLOBAL_OPTIONS = ("verbose", "threads", "budget", "format", "output", "config", "handler")
GENERATOR = "numpy.random.default_rng(PCG64)"


@dataclass(frozen=True, eq=False)
class Job:
    """A parsed command with its decoded input file."""
    args: Namespace
    arguments: dict
    digest: str
    settings: Settings
    tensor: Tensor | None = None
    basis: TensorSubspace | None = None


def command_arguments(args: Namespace) -> dict:
    return {key: value for key, value in sorted(vars(args).items()) if key not in GLOBAL_OPTIONS}


@dataclass
class LoadInput(Stage[Namespace, Job]):
    """Reads the command's input file, if it takes one, and digests the request."""
    settings: Settings = DEFAULT_SETTINGS

    def transform(self, args: Namespace) -> list[Job]:
        arguments = command_arguments(args)
        path = arguments.get("file")
        if path is None:
            return [Job(args, arguments, input_digest(arguments), self.settings)]
        data = pathlib.Path(path).read_bytes()
        digest = input_digest({k: v for k, v in arguments.items() if k != "file"}, data)
        if args.command == "subspace":
            return [Job(args, arguments, digest, self.settings, basis=decode_basis(data))]
        return [Job(args, arguments, digest, self.settings, tensor=decode_tensor(data))]


def _mode(T: Tensor, mode: int | None) -> int:
    """0-based mode from a 1-based one; None means the last mode."""
    if mode is None:
        return T.order - 1
    if not 1 <= mode <= T.order:
        raise ValueError(f"mode {mode} out of range 1..{T.order}")
    return mode - 1


def _ar_entry(result: ARExact) -> dict:
    return {"mode": result.k + 1, "m": result.m, "zero_count": str(result.zero_count)}


@dataclass
class CommandStage(Stage[Job, Report]):
    """Times `compute`, which fills in a fresh report."""

    def transform(self, job: Job) -> list[Report]:
        start = time.perf_counter()
        report = Report(command=job.args.command, arguments=job.arguments, digest=job.digest,
                        workers=job.settings.workers)
        self.compute(job, report)
        report.timing = round(time.perf_counter() - start, 6)
        logger.info("%s finished in %.3fs", report.command, report.timing)
        return [report]

    def compute(self, job: Job, report: Report) -> None:
        raise NotImplementedError


class AnalyticRankCommand(CommandStage):
    def compute(self, job: Job, report: Report) -> None:
        T, settings = job.tensor, job.settings
        modes = job.args.mode or list(range(1, T.order + 1))
        results = [analytic_rank_zero_count(T, _mode(T, k), settings=settings) for k in modes]
        for a, b in itertools.pairwise(results):
            if not a.consistent_with(b):
                raise VerificationFailed(f"zero counts at modes {a.k + 1} and {b.k + 1} disagree")
        report.exact["q"] = T.field.q
        report.exact["modes"] = [_ar_entry(r) for r in results]
        report.exact["cross_mode_consistent"] = True
        for r in results:
            report.approx[f"ar.mode{r.k + 1}"] = decimal(r.value())
        if job.args.char_check:
            value = analytic_rank_char(T, settings=settings)
            discrepancy = max(abs(value - r.value()) for r in results)
            report.approx["ar.char"] = decimal(value)
            report.approx["char_discrepancy"] = decimal(discrepancy)
            if discrepancy > 1e-9:
                raise VerificationFailed(f"character sum and zero count disagree by {discrepancy}")


class GeometricRankCommand(CommandStage):
    def compute(self, job: Job, report: Report) -> None:
        T = job.tensor
        estimate = geometric_rank_estimate(T, _mode(T, job.args.mode), job.args.lmax, settings=job.settings)
        report.exact.update(estimate.to_dict())
        report.exact["mode"] = report.exact.pop("k") + 1
        report.approx["residual"] = decimal(estimate.residual)
        for level in estimate.levels:
            ar = estimate.m - math.log(level.zero_count) / math.log(estimate.q ** level.l)
            report.approx[f"ar.l{level.l}"] = decimal(ar)


class RankCommand(CommandStage):
    SEARCHES = {"slice": slice_rank, "partition": partition_rank, "cp": cp_rank}

    def compute(self, job: Job, report: Report) -> None:
        T, settings = job.tensor, job.settings
        value, cert = self.SEARCHES[job.args.kind](T, settings=settings)
        report.exact["kind"] = job.args.kind
        report.exact["value"] = value
        report.exact["flatten_ranks"] = flatten_ranks(T)
        report.certificates.append(cert.to_dict())
        if job.args.subrank is not None:
            restriction = subrank_at_least(T, job.args.subrank, settings=settings)
            report.exact["subrank"] = {"s": job.args.subrank, "at_least": restriction is not None}
            if restriction is not None:
                report.certificates.append(restriction.to_dict())


class StabilityCommand(CommandStage):
    def compute(self, job: Job, report: Report) -> None:
        T = job.tensor
        result = stability_check(T, job.args.l, _mode(T, job.args.mode), settings=job.settings)
        l = result.l
        report.exact["l"] = l
        report.exact["base"] = _ar_entry(result.base)
        report.exact["native"] = _ar_entry(result.native)
        report.exact["kron"] = _ar_entry(result.kron)
        report.exact["identity_holds"] = result.identity_holds
        report.approx["ar.base"] = decimal(result.base.value())
        report.approx["ar.native"] = decimal(result.native.value())
        report.approx["ar.native_times_l"] = decimal(l * result.native.value())
        report.approx["ar.kron"] = decimal(result.kron.value())
        report.approx["ratio.native_over_base"] = decimal(result.ratio())
        d, q = T.order, T.field.q
        report.annotations.append(
            f"the ratio is bounded by constants c(d,q) >= 1/(48 d^2 q) = {decimal(1 / (48 * d * d * q))} and "
            f"C(d,q) <= 1/(1 - log_q d) (valid only when q > d); neither is computed")


class MatmulTableCommand(CommandStage):
    def compute(self, job: Job, report: Report) -> None:
        n, lmax, field = job.args.n, job.args.lmax, field_of_order(job.args.q)
        if lmax < 1:
            raise ValueError(f"--lmax must be at least 1, got {lmax}")
        T = matmul_tensor(n, field)
        m = 2 * n * n
        if lmax >= 2:
            try:
                estimate = geometric_rank_estimate(T, 2, lmax, settings=job.settings)
            except InconclusiveEstimate as exc:
                estimate = exc.estimate
                report.annotations.append(str(exc))
            counts = [level.zero_count for level in estimate.levels]
            report.exact["gr_estimate"] = estimate.gr
            report.approx["gr_residual"] = decimal(estimate.residual)
        else:
            counts = [analytic_rank_zero_count(T, 2, settings=job.settings).zero_count]
        levels = []
        for l, count in enumerate(counts, start=1):
            q_l = field.q ** l
            pairs = matmul_pair_count(n, q_l)
            if pairs != count:
                raise VerificationFailed(f"zero count {count} differs from the pair count {pairs} at l={l}")
            levels.append({"l": l, "zero_count": str(count), "pair_count": str(pairs)})
            report.approx[f"ar.l{l}"] = decimal(m - math.log(count) / math.log(q_l))
            report.approx[f"log_pairs.l{l}"] = decimal(math.log(pairs) / math.log(q_l))
        report.exact["n"] = n
        report.exact["q"] = field.q
        report.exact["levels"] = levels
        report.exact["gr_formula"] = math.ceil(3 * n * n / 4)
        report.annotations.append("ar.l* is 2n^2 - log_{q^l} #{(A,B): AB = 0}; log_pairs.l* is the count's "
                                  "logarithm alone, reported for comparison")


def _dump(check: str, sample: int, tensors: dict[str, Tensor], **details) -> dict:
    docs = {name: msgspec.structs.asdict(to_document(T)) for name, T in tensors.items()}
    return {"check": check, "sample": sample, "tensors": docs, **details}


class AuditCommand(CommandStage):
    """Seeded checks of the exact identities and inequalities between the ranks.

    The cheap checks run on every sample; searches run on the first `probes`
    samples and are skipped with an annotation when a guard would be exceeded.
    """

    def compute(self, job: Job, report: Report) -> None:
        args, settings = job.args, job.settings
        field = field_of_order(args.q)
        shape = tuple(args.shape)
        q, k = field.q, len(shape) - 1
        rng = np.random.default_rng(args.seed)
        report.generator, report.seed = GENERATOR, args.seed
        checks = dict.fromkeys(["ar_additivity", "restriction", "slice_additivity", "gr_le_pr", "pr_le_sr",
                                "pr_sandwich"], 0)
        probes = []
        for sample in range(args.count):
            T = random_tensor(shape, field, rng)
            S = random_tensor(shape, field, rng)
            mats = MatrixTuple(field, tuple(rng.integers(0, q, size=(n, n)) for n in shape))

            zt, zs = (analytic_rank_zero_count(X, k, settings=settings) for X in (T, S))
            zsum = analytic_rank_zero_count(direct_sum(T, S), k, settings=settings)
            if zsum.zero_count * q ** (zt.m + zs.m) != zt.zero_count * zs.zero_count * q ** zsum.m:
                raise InequalityViolation("analytic rank is not additive on a direct sum",
                                          _dump("ar_additivity", sample, {"T": T, "S": S}))
            checks["ar_additivity"] += 1

            restricted = apply_matrices(mats, T)
            zr = analytic_rank_zero_count(restricted, k, settings=settings)
            if zr.zero_count < zt.zero_count:
                raise InequalityViolation("a restriction increased the analytic rank",
                                          _dump("restriction", sample, {"T": T, "restricted": restricted},
                                                mats=mats.rows()))
            checks["restriction"] += 1

            if sample < args.probes:
                probe = self._probe(sample, T, S, settings, checks, report)
                probes.append(probe)
        report.exact["samples"] = args.count
        report.exact["shape"] = list(shape)
        report.exact["q"] = q
        report.exact["checks"] = checks
        report.exact["probes"] = probes
        for probe in probes:
            if "pr_direct_sum" in probe and probe["pr"]:
                report.approx[f"direct_sum_ratio.sample{probe['sample']}"] = decimal(
                    probe["pr_direct_sum"] / (2 * probe["pr"]))

    def _probe(self, sample: int, T: Tensor, S: Tensor, settings: Settings, checks: dict, report: Report) -> dict:
        probe = {"sample": sample}
        try:
            sr_t, _ = slice_rank(T, settings=settings)
            sr_s, _ = slice_rank(S, settings=settings)
            sr_sum, _ = slice_rank(direct_sum(T, S), settings=settings)
            probe["sr"] = [sr_t, sr_s, sr_sum]
            if sr_sum != sr_t + sr_s:
                raise InequalityViolation("slice rank is not additive on a direct sum",
                                          _dump("slice_additivity", sample, {"T": T, "S": S}, sr=probe["sr"]))
            checks["slice_additivity"] += 1

            pr, _ = partition_rank(T, settings=settings)
            probe["pr"] = pr
            if pr > sr_t:
                raise InequalityViolation("partition rank exceeds slice rank",
                                          _dump("pr_le_sr", sample, {"T": T}, pr=pr, sr=sr_t))
            checks["pr_le_sr"] += 1
        except GuardExceeded as exc:
            report.annotations.append(f"sample {sample}: search skipped ({exc})")
            return probe

        try:
            probe["pr_direct_sum"] = partition_rank(direct_sum(T, T), settings=settings)[0]
        except GuardExceeded as exc:
            report.annotations.append(f"sample {sample}: partition rank of T ⊕ T skipped ({exc})")

        try:
            estimate = geometric_rank_estimate(T, T.order - 1, 3, settings=settings)
            probe["gr"] = estimate.gr
            if estimate.residual < 0.2:
                if estimate.gr > pr:
                    raise InequalityViolation("geometric rank estimate exceeds partition rank",
                                              _dump("gr_le_pr", sample, {"T": T}, gr=estimate.gr, pr=pr))
                checks["gr_le_pr"] += 1
        except (InconclusiveEstimate, GuardExceeded) as exc:
            report.annotations.append(f"sample {sample}: geometric rank not compared ({exc})")

        if T.order == 3:
            try:
                sandwich = extension_pr_sandwich(T, settings=settings)
            except GuardExceeded as exc:
                report.annotations.append(f"sample {sample}: extension sandwich skipped ({exc})")
            else:
                probe["sandwich"] = msgspec.structs.asdict(sandwich)
                if not sandwich.holds:
                    raise InequalityViolation("partition rank leaves the extension sandwich",
                                              _dump("pr_sandwich", sample, {"T": T}, **probe["sandwich"]))
                checks["pr_sandwich"] += 1
        return probe


class SubspaceCommand(CommandStage):
    def compute(self, job: Job, report: Report) -> None:
        W, settings = job.basis, job.settings
        if W.dim == 0:
            raise ValueError("the basis file lists no tensors")
        value, witness = sr_subspace(W, settings=settings)
        report.exact["dim"] = W.dim
        report.exact["shape"] = list(W.shape)
        report.exact["sr"] = value
        report.certificates.append({"kind": "annihilating_subspaces",
                                    "subspace": msgspec.structs.asdict(to_basis_document(W)),
                                    "witness": [u.rows() for u in witness]})
        if job.args.k is not None:
            report.exact["sr_k"] = {"k": job.args.k, "value": sr_k_subspace(W, job.args.k, settings=settings)}
        if job.args.tw:
            tw_value, cert = slice_rank(tw_tensor(W), settings=settings)
            report.exact["tw"] = {"shape": list(cert.shape), "sr": tw_value}
            report.certificates.append(cert.to_dict())
            if tw_value != value:
                raise VerificationFailed(f"slice rank of the subspace tensor is {tw_value}, of the subspace {value}")
        report.annotations.append(f"SR(W) is at most {W.order / 2 + 1} times SR(W) over the algebraic closure "
                                  "(not computed)")


class ConstructCommand(CommandStage):
    def compute(self, job: Job, report: Report) -> None:
        args = job.args
        field = field_of_order(args.q)
        d, l = args.d, args.l
        report.exact["kind"] = args.kind
        match args.kind:
            case "interp":
                dec = interp_decomp(d, l, field)
                report.exact["terms"] = dec.n_points
                report.exact["points"] = list(dec.points)
                report.certificates.append(dec.to_dict())
            case "pushforward":
                cert = pushforward_to_extension(interp_decomp(d, l, field), d, l, field)
                report.exact["terms"] = cert.rank
                report.certificates.append(cert.to_dict())
            case "subrank":
                cert = subrank_cert_interpolation(d, l, field)
                report.exact["subrank_at_least"] = cert.target.shape[0]
                report.exact["ceiling_bound"] = math.ceil((l - 1) / (d - 1))
                report.certificates.append(cert.to_dict())
                report.annotations.append(f"function-field lower bound l/(48 d^2 q) = "
                                          f"{decimal(l / (48 * d * d * field.q))} (not constructed)")
            case "monotonicity":
                chain = poly_monotonicity_check(d, args.n, l, field)
                report.certificates.append(chain.to_dict())
            case kind:
                raise ValueError(f"unknown construction {kind!r}")
        report.exact["verified"] = True


COMMANDS: dict[str, type[CommandStage]] = {
    "ar": AnalyticRankCommand,
    "gr": GeometricRankCommand,
    "rank": RankCommand,
    "stability": StabilityCommand,
    "matmul-table": MatmulTableCommand,
    "audit": AuditCommand,
    "subspace": SubspaceCommand,
    "construct": ConstructCommand,
}


def build_pipeline(args: Namespace, settings: Settings, stream=None) -> Pipeline[Namespace, Report]:
    stages = [LoadInput(settings), COMMANDS[args.command](), PrintReport(fmt=args.format, stream=stream)]
    if args.output:
        stages.append(WriteReport(args.output, fmt=args.format))
    return Pipeline[Namespace, Report](stages)


def run_command(args: Namespace, settings: Settings, stream=None) -> Report:
    [report] = build_pipeline(args, settings, stream).run(args)
    return report
