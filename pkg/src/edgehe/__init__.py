"""Edge-side CKKS conversion datapath with a bank-conflict simulator."""

__version__ = "1.0.0"
