#!/usr/bin/env python3
"""One adaptive phase-estimation run, step by step.

A hidden phase is estimated with a grouped sequence (single photons, then a
two-photon chi state, then a four-photon chi state).  Before every
detection the controlled phase is chosen to maximize the expected
sharpness; the posterior lives entirely in Fourier coefficients, so each
Bayes update is a short convolution.
"""

import math

import numpy as np

from lossyphase.detection import build_likelihood_table, evaluate_outcome
from lossyphase.feedback import optimal_theta_numeric, optimal_theta_single_photon
from lossyphase.posterior import bayes_update, flat_prior, holevo_variance, sharpness
from lossyphase.states import make_loss_resistant, make_single_photon

ETA = 0.6
TRUE_PHI = 2.2515
rng = np.random.default_rng(42)

tables = [build_likelihood_table(make_single_photon(), ETA)] * 5
tables += [build_likelihood_table(make_loss_resistant(1, 1.7), ETA)]
tables += [build_likelihood_table(make_loss_resistant(2, 1.3), ETA)]
kinds = ["single"] * 5 + ["two-photon", "four-photon"]

post = flat_prior()
print(f"hidden phase: {TRUE_PHI:.4f} rad")
print(f"{'step':>4} {'state':>12} {'theta':>8} {'outcome':>9} "
      f"{'sharpness':>10} {'V_H':>9}")
for step, (kind, table) in enumerate(zip(kinds, tables), start=1):
    if kind == "single":
        theta = optimal_theta_single_photon(post)
    else:
        theta = optimal_theta_numeric(post, table)
    probs = np.array([evaluate_outcome(table, o, TRUE_PHI, theta)
                      for o in table.outcomes])
    pick = rng.choice(len(probs), p=probs / probs.sum())
    outcome = table.outcomes[pick]
    post = bayes_update(post, table, outcome, theta)
    print(f"{step:>4} {kind:>12} {theta:8.4f} (L={outcome.lost},k={outcome.detected_k})"
          f" {sharpness(post):10.4f} {holevo_variance(post):9.4f}")

estimate = math.atan2(post.coefficient(1).imag, post.coefficient(1).real)
err = (estimate - TRUE_PHI + math.pi) % (2 * math.pi) - math.pi
print(f"\nestimate: {estimate % (2 * math.pi):.4f} rad  (error {err:+.4f})")
