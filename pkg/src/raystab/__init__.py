"""Ray stabilisers of bounded automata groups and their ET0L grammars."""

__version__ = "0.1.0"
