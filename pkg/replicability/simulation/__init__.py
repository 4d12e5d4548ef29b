"""Selection-bias curves, ground-truth harnesses and Monte Carlo oracles."""
