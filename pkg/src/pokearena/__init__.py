"""pokearena: a deterministic Pokemon-style battle arena for LLM battle agents.

Provides a self-contained battle engine, a battle-server protocol parser,
state-to-text translation with feedback and knowledge augmentation, agent
policies with pluggable completion endpoints, baseline bots, and an
evaluation harness with CLI and web service.
"""

__version__ = "0.1.0"

from pokearena.dex import Pokedex, load_bundled, load_pokedex

__all__ = ["Pokedex", "load_pokedex", "load_bundled", "__version__"]
