"""Word and tree automata used by the decision procedures."""
