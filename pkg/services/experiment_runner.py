"""
Experiment Runner Module

This module turns a RunConfig into a result document. It acts as the single place where
the bound calculators, the Monte Carlo estimators and the enumeration oracle are wired
to presets, deal files, seeds and guards.
"""

import logging
from typing import Any, Dict, List, Optional

from core import bounds, estimator, oracle
from core.engine import Deal, GameParams, deal_random, stream_rng
from core.errors import ParamsError
from services.report_formatter import number
from services.settings import MODE_BOTH, RunConfig
from storage.deal_files import RANK_CHARS, format_deal, params_document, parse_deal_file

logger = logging.getLogger(__name__)

# Salt of the stream that draws the deal of single-deal commands when no file is given
DEAL_SALT = 1


class ExperimentRunner:
    """
    Dispatches one command:
    1. Resolves parameters and mode
    2. Loads or draws the deal when the command needs one
    3. Runs the computation under the configured guards
    4. Returns a document for the report formatter
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.params = config.params()
        self.guard = config.guards.guard()
        self._dispatch = {
            "bounds": self.run_bounds,
            "frank": self.run_frank,
            "profile": self.run_profile,
            "estimate": self.run_estimate,
            "oracle": self.run_oracle,
            "verify": self.run_verify,
        }

    def run(self) -> Dict[str, Any]:
        """
        Run the configured command.

        Raises:
            TrickspaceError: Invalid input (ParamsError, DealFileError) or a hit guard
                (LimitError).
        """
        command = self.config.command
        logger.info("Running %s with %s", command, self.params)
        return self._dispatch[command]()

    # === HELPERS ===

    def _document(self, params: Optional[GameParams] = None, columns: Optional[List[str]] = None,
                  rows: Optional[List[Dict[str, Any]]] = None,
                  summary: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        return {
            "command": self.config.command if self.config.target is None
            else f"{self.config.command} {self.config.target}",
            "params": params_document(params or self.params),
            "columns": columns or [],
            "rows": rows or [],
            "summary": summary or {},
        }

    def _single_mode_params(self) -> GameParams:
        mode = self.config.resolved_mode()
        if mode == MODE_BOTH:
            raise ParamsError(f"'{self.config.command}' plays a single mode; use --mode nt or trump")
        return estimator.params_for_mode(self.params, mode)

    def _modes(self) -> List[str]:
        mode = self.config.resolved_mode()
        return [estimator.MODE_NO_TRUMP, estimator.MODE_TRUMP] if mode == MODE_BOTH else [mode]

    def load_deal(self) -> Deal:
        """The --deal file, or a deal drawn from the seed."""
        if self.config.deal:
            return parse_deal_file(self.config.deal, self.params)
        return deal_random(self.params, stream_rng(self.config.seed, 0, salt=DEAL_SALT))

    def _deal_summary(self, deal: Deal) -> Dict[str, Any]:
        if deal.params.ranks_per_suit > len(RANK_CHARS):
            return {}
        return {"deal": format_deal(deal)}

    # === BOUNDS ===

    def run_bounds(self) -> Dict[str, Any]:
        params = self.params
        rows = [{"k": k, "f": number(fk), "f_p": number(fpk)} for k, fk, fpk in bounds.bound_table(params)]
        summary: Dict[str, Any] = {
            "state_space_with_scores": number(bounds.state_space_upper_bound(params, True)),
            "state_space_without_scores": number(bounds.state_space_upper_bound(params, False)),
            "tree_size_upper": number(bounds.tree_size_upper_bound(params)),
            "tree_size_weak_lower": number(bounds.tree_size_weak_lower_bound(params)),
            "frank_minimum": number(bounds.min_frank_bound(params)),
        }
        for name, value in bounds.log10_summary(params).items():
            summary[f"log10_{name}"] = round(value, 6)
        return self._document(columns=["k", "f", "f_p"], rows=rows, summary=summary)

    # === FRANK ===

    def run_frank(self) -> Dict[str, Any]:
        params = self.params
        if self.config.deal:
            deal = self.load_deal()
            shape = bounds.shape_of(deal)
            rows = [
                {"hand": hand, "pattern": shape.hand_pattern(hand),
                 "factor": number(bounds.hand_frank_factor(row))}
                for hand, row in enumerate(shape.rows)
            ]
            summary = self._deal_summary(deal)
            summary["frank_bound"] = number(bounds.frank_lower_bound(deal, params))
            return self._document(columns=["hand", "pattern", "factor"], rows=rows, summary=summary)

        max_shapes = self.config.guards.max_shapes
        balanced = bounds.most_balanced_shape(params)
        exact = bounds.expected_frank_bound_exact(params, max_shapes)
        summary = {
            "most_balanced_pattern": balanced.hand_pattern(0),
            "frank_minimum": number(bounds.min_frank_bound(params)),
            "shape_tables": number(bounds.count_shape_tables(params, max_shapes)),
            "expected_exact": number(exact),
            "expected_closed_form": number(bounds.expected_frank_bound_closed_form(params, max_shapes)),
        }
        if self.config.games is not None:
            estimate = bounds.expected_frank_bound_mc(params, self.config.games, self.config.seed)
            moments = estimate.moments
            summary.update({
                "mc_deals": moments.n,
                "mc_seed": estimate.seed,
                "mc_mean": number(estimate.mean),
                "mc_stderr": number(moments.stderr()),
            })
        return self._document(summary=summary)

    # === PROFILE ===

    def _profile_rows(self, profile: estimator.BranchingProfile, with_mode: bool) -> List[Dict[str, Any]]:
        rows = []
        for trick, mean, stderr, n in profile.rows():
            row: Dict[str, Any] = {"mode": profile.mode} if with_mode else {}
            row.update({
                "trick": trick,
                "avg_moves": number(mean),
                "stderr": number(stderr),
                "n": n,
                "leader_degree": profile.leader_degree(trick),
                "seat_means": [number(profile.seat_mean(trick, offset))
                               for offset in range(1, profile.followers + 1)],
            })
            rows.append(row)
        return rows

    def run_profile(self) -> Dict[str, Any]:
        config = self.config
        games = config.resolved_games()
        mode = config.resolved_mode()
        common = dict(leader0=config.leader, seed=config.seed, workers=config.workers,
                      playouts_per_deal=config.playouts_per_deal)
        summary: Dict[str, Any] = {
            "games": games,
            "playouts_per_deal": config.playouts_per_deal,
            "seed": config.seed,
        }
        if mode == MODE_BOTH:
            nt_profile, trump_profile = estimator.paired_trump_nt_profile(self.params, games, **common)
            rows = self._profile_rows(nt_profile, True) + self._profile_rows(trump_profile, True)
            summary["trump_suit"] = trump_profile.params.trump
            summary["trick1_equal"] = nt_profile.tricks[0] == trump_profile.tricks[0]
            columns = ["mode", "trick", "avg_moves", "stderr", "n"]
            return self._document(columns=columns, rows=rows, summary=summary)

        params = estimator.params_for_mode(self.params, mode)
        profile = estimator.branching_profile(params, games, **common)
        return self._document(params, ["trick", "avg_moves", "stderr", "n"],
                              self._profile_rows(profile, False), summary)

    # === ESTIMATE ===

    def run_estimate(self) -> Dict[str, Any]:
        config = self.config
        games = config.resolved_games()
        rows = []
        within = True
        lower = bounds.tree_size_weak_lower_bound(self.params)
        upper = bounds.tree_size_upper_bound(self.params)
        for mode in self._modes():
            report = estimator.estimate_tree_size(
                estimator.params_for_mode(self.params, mode), games, leader0=config.leader,
                seed=config.seed, workers=config.workers, playouts_per_deal=config.playouts_per_deal,
            )
            within = within and lower <= report.min and report.max <= upper
            rows.append({
                "mode": report.mode,
                "n": report.n,
                "mean": number(report.mean),
                "stderr": number(report.stderr),
                "stddev": number(report.stddev),
                "min": number(report.min),
                "max": number(report.max),
            })
        summary = {
            "seed": config.seed,
            "playouts_per_deal": config.playouts_per_deal,
            "tree_size_weak_lower": number(lower),
            "tree_size_upper": number(upper),
            "samples_within_bounds": within,
        }
        return self._document(columns=["mode", "n", "mean", "stderr", "stddev", "min", "max"],
                              rows=rows, summary=summary)

    # === ORACLE ===

    def run_oracle(self) -> Dict[str, Any]:
        target = self.config.target or "leaves"
        if target == "leaves":
            return self._oracle_leaves()
        return self._oracle_states()

    def _oracle_leaves(self) -> Dict[str, Any]:
        params = self._single_mode_params()
        deal = self.load_deal()
        leaves = oracle.count_leaves(deal, params, self.config.leader, self.guard)
        frank = bounds.frank_lower_bound(deal, params)
        upper = bounds.tree_size_upper_bound(params)
        summary = self._deal_summary(deal)
        summary.update({
            "leaves": number(leaves),
            "frank_bound": number(frank),
            "tree_size_upper": number(upper),
            "within_bounds": frank <= leaves <= upper,
        })
        return self._document(params, summary=summary)

    def _oracle_states(self) -> Dict[str, Any]:
        params = self._single_mode_params()
        rows = []
        within = True
        for include_scores in (True, False):
            counts = oracle.count_reachable_states(params, include_scores, self.config.leader, self.guard)
            bound = bounds.state_space_upper_bound(params, include_scores)
            within = within and counts.max_per_deal <= bound
            rows.append({
                "scores": include_scores,
                "deals": counts.deals,
                "max_per_deal": number(counts.max_per_deal),
                "family_union": number(counts.family_union),
                "bound": number(bound),
            })
        return self._document(params, ["scores", "deals", "max_per_deal", "family_union", "bound"],
                              rows, {"per_deal_within_bounds": within})

    # === VERIFY ===

    def run_verify(self) -> Dict[str, Any]:
        config = self.config
        params = self._single_mode_params()
        deal = self.load_deal()
        report = oracle.verify_unbiasedness(deal, params, config.resolved_games(), config.seed,
                                            config.leader, self.guard)
        exact = oracle.exact_estimator_moments(deal, params, config.leader, self.guard)
        summary = self._deal_summary(deal)
        summary.update({
            "playouts": report.moments.n,
            "seed": config.seed,
            "exact_leaves": number(report.exact_leaves),
            "sample_mean": number(report.sample_mean),
            "stderr": number(report.stderr),
            "z_score": number(report.z_score),
            "exact_variance": number(exact.variance),
            "passed": report.passed,
        })
        return self._document(params, summary=summary)
