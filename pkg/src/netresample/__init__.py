"""netresample: resampling-based network inference and signed graphlet analysis.

Pipelines
---------
- partial-correlation (Gaussian) networks: replicate graphical-lasso fits
  aggregated into a consensus network with edge selection frequencies,
  percentile confidence intervals and BH-adjusted empirical p-values;
- PC-stable skeleton/CPDAG learning with skeleton, orientation and
  Markov-blanket selection frequencies;
- downstream analysis: signed graphlet degree vectors, centrality,
  community detection and differential connectivity.
"""

__version__ = "0.1.0"
