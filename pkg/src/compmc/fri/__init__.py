"""Fuzzy rule induction."""

from .annotate import (
    COVID_ATTRIBUTE_MAP,
    DEFAULT_DISPLAY_THRESHOLD,
    annotate_and_filter,
    base_attribute,
    majority_vote,
    resolve_attribute,
)
from .crisp import (
    Condition,
    CrispRule,
    CrispRuleSet,
    Test,
    grow_prune_split,
    grow_rule,
    induce_crisp_rules,
    merge_tests,
    prune_rule,
)
from .export import format_rule, rule_to_dict, rules_to_json, rules_to_text, write_rules, write_rules_json
from .fuzzy import (
    FuzzyCondition,
    FuzzyModel,
    FuzzyRule,
    certainty_factor,
    fit_fuzzy_model,
    fuzzify_rule,
    purity,
    weighted_purity,
)
from .membership import FuzzySet, trapezoid_membership

__all__ = [
    "COVID_ATTRIBUTE_MAP", "DEFAULT_DISPLAY_THRESHOLD", "annotate_and_filter", "base_attribute",
    "majority_vote", "resolve_attribute", "Condition", "CrispRule", "CrispRuleSet", "Test",
    "grow_prune_split", "grow_rule", "induce_crisp_rules", "merge_tests", "prune_rule",
    "format_rule", "rule_to_dict", "rules_to_json", "rules_to_text", "write_rules",
    "write_rules_json", "FuzzyCondition", "FuzzyModel", "FuzzyRule", "certainty_factor",
    "fit_fuzzy_model", "fuzzify_rule", "purity", "weighted_purity", "FuzzySet",
    "trapezoid_membership",
]
