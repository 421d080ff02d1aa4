"""Does the selected kernel scale track the system's attenuation?

The Szego kernel's alpha parameter plays the role of a pole attenuation.
Fitting the kernel model to rational targets whose poles all sit at
Re(p) = -beta, the maximum penalized likelihood should pick alpha close to
beta.  This script sweeps beta and prints the recovered alpha values.
"""

import numpy as np

from frfit import optimize_hyperparams, validate_training
from frfit.bench import f_rat_beta
from frfit.interpolate import TrainingSet

N_TRAIN = 20

print("beta (pole attenuation)   selected alpha   ratio")
for beta in [0.05, 0.10, 0.15, 0.20, 0.25]:
    w = np.linspace(0.0, 1.0, N_TRAIN)
    ts = validate_training(TrainingSet(w, f_rat_beta(w, beta)), symmetric=True)
    hp = optimize_hyperparams(ts, 0, rng=np.random.default_rng(0))
    print(f"{beta:>10.2f} {hp.alpha:>22.4f} {hp.alpha / beta:>9.2f}")
