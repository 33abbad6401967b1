"""The test module for spikeloom."""
