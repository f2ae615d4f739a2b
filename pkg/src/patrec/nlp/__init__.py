"""Character n-gram language models, Zipf analysis and probabilistic parsing."""
