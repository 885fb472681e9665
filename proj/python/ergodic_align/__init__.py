# Copyright 2026 The ergodic-align Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Ergodic interference alignment over finite fields.

Exact quantities come back as fractions.Fraction.
"""

from ._core import (
    BudgetExceeded,
    EnumerationTooLarge,
    SlotCapExceeded,
    add,
    best_scheme_table,
    bounds,
    draw_matrix,
    exact_round_probability,
    figure_points,
    fit_exponent,
    harmonic_bounds,
    is_prime,
    jap_exponent,
    japb_exponent,
    lemma3_convolution,
    lemma3_failure,
    lemma3_failure_unsigned,
    linear_dependence,
    monte_carlo,
    mul,
    mul_inv,
    optimize,
    rank,
    recovery_check,
    regime_child_sweep,
    regime_parent_sweep,
    relative_entropy,
    run_cli,
    run_scheme,
    scheme_dof,
    span_fullness,
    two_point_exponent,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
