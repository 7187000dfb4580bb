"""LLM action generation: prompts, completion endpoints, parsing, and voting.

Strategies: single-shot (io), chain-of-thought (cot), self-consistency
voting over k samples (sc), and tree-of-thought proposal + self-evaluation
(tot). Feedback memory (icrl) and knowledge annotations (kag) are toggled
per configuration. The output grammar is one JSON directive line, e.g.
``{"action": "move", "name": "Fire Blast"}``; unparseable outputs are
retried and finally replaced by the highest-power fallback, flagged on the
decision.
"""

from __future__ import annotations

import json
import os
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import httpx

from pokearena.engine import Action, BattleState
from pokearena.feedback import FeedbackItem, derive_feedback
from pokearena.knowledge import annotate
from pokearena.textstate import LabeledAction, Observation, describe

DEFAULT_SC_TEMPERATURE = 0.8
DEFAULT_TEMPERATURE = 0.3
DEFAULT_RETRY_BUDGET = 2
DEFAULT_WINDOW = 5
KAG_MODES = ("none", "type", "effect", "both")

SYSTEM_INSTRUCTIONS = (
    "You are a skilled Pokemon battle player. Each turn you receive the "
    "battle state and a menu of legal actions. Choose exactly one action."
)
OUTPUT_INSTRUCTION = (
    'Answer with a single JSON line: {"action": "move", "name": "<move name>"} '
    'or {"action": "switch", "name": "<Pokemon name>"}.'
)
COT_INSTRUCTION = (
    "First write a short thought that analyzes the current battle situation, "
    "then output your chosen action on the final line."
)


class AgentError(Exception):
    pass


class ActionParseError(AgentError):
    pass


class EndpointError(AgentError):
    pass


@dataclass
class PolicyConfig:
    strategy: str = "io"  # io | cot | sc | tot
    k: int = 1
    icrl: bool = False
    kag: str = "none"
    temperature: Optional[float] = None
    window: int = DEFAULT_WINDOW
    max_tokens: int = 256
    retry_budget: int = DEFAULT_RETRY_BUDGET

    def __post_init__(self) -> None:
        if self.strategy not in ("io", "cot", "sc", "tot"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.kag not in KAG_MODES:
            raise ValueError(f"unknown kag mode {self.kag!r}")
        if self.strategy == "sc":
            if self.k < 1:
                raise ValueError("sc requires k >= 1")
        elif self.strategy == "tot":
            if self.k < 2:
                raise ValueError("tot requires k >= 2")
        else:
            self.k = 1
        if self.temperature is None:
            self.temperature = DEFAULT_SC_TEMPERATURE if self.strategy == "sc" else DEFAULT_TEMPERATURE
        if self.strategy == "sc" and self.temperature <= 0:
            raise ValueError("sc requires temperature > 0")


@dataclass
class Decision:
    action: Action
    samples: list = field(default_factory=list)      # raw endpoint texts
    candidates: list = field(default_factory=list)   # parsed Action or None per sample
    votes: dict = field(default_factory=dict)        # label -> count (sc only)
    evaluation: str = ""                             # raw evaluation text (tot only)
    fallback: bool = False
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "action": self.action.to_dict(),
            "samples": list(self.samples),
            "candidates": [c.to_dict() if c else None for c in self.candidates],
            "votes": dict(self.votes),
            "evaluation": self.evaluation,
            "fallback": self.fallback,
            "error": self.error,
        }


class HttpEndpoint:
    """Chat-completion HTTP endpoint (OpenAI-style request/response bodies).

    The key is read from configuration or the environment, never from CLI
    flags. Retries transport errors up to ``retries`` times.
    """

    def __init__(self, base_url: str, model: str, api_key: Optional[str] = None,
                 timeout: float = 60.0, retries: int = 2):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key or os.environ.get("POKEARENA_API_KEY", "")
        self.timeout = timeout
        self.retries = retries
        self._client = httpx.Client(timeout=timeout)

    def complete(self, prompt: str, temperature: float, max_tokens: int) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
            "max_tokens": max_tokens,
        }
        last_error: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                response = self._client.post(
                    f"{self.base_url}/chat/completions", json=body, headers=headers)
                response.raise_for_status()
                data = response.json()
                return data["choices"][0]["message"]["content"]
            except Exception as exc:  # transport, HTTP, or shape errors
                last_error = exc
        raise EndpointError(f"endpoint failed after {self.retries + 1} attempts: {last_error}")


class ScriptedEndpoint:
    """Replays a fixed transcript of completions, in order."""

    def __init__(self, responses: Sequence[str]):
        self.responses = list(responses)
        self.calls: list[str] = []

    def complete(self, prompt: str, temperature: float, max_tokens: int) -> str:
        self.calls.append(prompt)
        if len(self.calls) > len(self.responses):
            raise EndpointError("scripted transcript exhausted")
        return self.responses[len(self.calls) - 1]


class CallableEndpoint:
    """Adapts a plain ``prompt -> text`` function (used heavily in tests)."""

    def __init__(self, fn: Callable[[str], str]):
        self.fn = fn
        self.calls: list[str] = []

    def complete(self, prompt: str, temperature: float, max_tokens: int) -> str:
        self.calls.append(prompt)
        return self.fn(prompt)


class PolicyOracleEndpoint:
    """Answers prompts by running a baseline policy on the live battle state.

    The battle runner binds the current (state, side) before each decision;
    the oracle then emits the policy's choice as a well-formed directive.
    Used for offline end-to-end tests of the full LLM plumbing.
    """

    def __init__(self, policy_fn: Callable[[BattleState, int], Action]):
        self.policy_fn = policy_fn
        self._state: Optional[BattleState] = None
        self._side: int = 0

    def bind(self, state: BattleState, side: int) -> None:
        self._state = state
        self._side = side

    def complete(self, prompt: str, temperature: float, max_tokens: int) -> str:
        if self._state is None:
            raise EndpointError("oracle endpoint not bound to a battle state")
        action = self.policy_fn(self._state, self._side)
        if action.kind == "move":
            return json.dumps({"action": "move", "name": action.name})
        species = self._state.side(self._side).team[action.slot].species
        return json.dumps({"action": "switch", "name": species})


_JSON_SPAN = re.compile(r"\{[^{}]*\}")


def parse_llm_action(raw: str, legal: Sequence[LabeledAction]) -> Action:
    """Extract the first well-formed directive and match it to a legal action.

    Matching is case-insensitive on the action labels (move names for moves,
    species names for switches; ``slot <n>`` also addresses a switch).
    Raises :class:`ActionParseError` when no directive is found or it names
    an illegal or unknown option.
    """
    directive = None
    for span in _JSON_SPAN.finditer(raw):
        try:
            obj = json.loads(span.group(0))
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict) and "action" in obj:
            directive = obj
            break
    if directive is None:
        raise ActionParseError("no action directive found in output")
    kind = str(directive.get("action", "")).lower()
    name = str(directive.get("name", directive.get("target", ""))).strip()
    if kind not in ("move", "switch"):
        raise ActionParseError(f"unknown directive action {kind!r}")
    if not name:
        raise ActionParseError("directive has no name")
    for candidate in legal:
        if candidate.kind != kind:
            continue
        if candidate.label.lower() == name.lower():
            return candidate.action
        if kind == "switch" and name.lower() in (f"slot {candidate.action.slot}",
                                                 str(candidate.action.slot)):
            return candidate.action
    raise ActionParseError(f"directive names illegal option {kind} {name!r}")


def fallback_action(legal: Sequence[LabeledAction]) -> Action:
    """Highest-power legal move, else the first legal switch."""
    moves = [c for c in legal if c.kind == "move"]
    if moves:
        return max(moves, key=lambda c: c.power).action
    return legal[0].action


def vote(candidates: Sequence[Action]) -> Action:
    """Plurality winner; ties break toward the earliest-seen tied candidate."""
    if not candidates:
        raise ValueError("vote() requires at least one candidate")
    counts: dict = {}
    order: list = []
    for action in candidates:
        key = (action.kind, action.name, action.slot)
        if key not in counts:
            counts[key] = 0
            order.append((key, action))
        counts[key] += 1
    best = max(counts.values())
    for key, action in order:
        if counts[key] == best:
            return action
    raise AssertionError("unreachable")


def build_prompt(observation: Observation, config: PolicyConfig, memory: "AgentMemory") -> str:
    """Deterministic concatenation of instructions, state, knowledge, feedback, menu."""
    parts = [SYSTEM_INSTRUCTIONS, ""]
    parts += [observation.own_team, "", observation.opponent_team, "",
              observation.field, "", observation.turn_history, ""]
    if config.kag != "none" and observation.knowledge:
        parts.append("Knowledge:")
        parts.extend(f"- {a.text}" for a in observation.knowledge)
        parts.append("")
    if config.icrl:
        entries = memory.recent(config.window)
        if entries:
            parts.append("Your previous actions and feedback:")
            for entry in entries:
                parts.append(f"- turn {entry['turn']}: you chose {entry['action']}")
                for item in entry["feedback"]:
                    parts.append(f"  feedback: {item.text}")
            parts.append("")
    parts.append("Legal actions:")
    parts.extend(f"- {c.display}" for c in observation.legal_actions)
    parts.append("")
    if config.strategy == "cot":
        parts.append(COT_INSTRUCTION)
    parts.append(OUTPUT_INSTRUCTION)
    return "\n".join(parts)


def _sample_action(endpoint, prompt: str, config: PolicyConfig, decision: Decision) -> Optional[Action]:
    """One sample with parse retries; returns None if the budget is exhausted."""
    legal = decision._legal  # attached by decide()
    for _ in range(config.retry_budget + 1):
        try:
            raw = endpoint.complete(prompt, config.temperature, config.max_tokens)
        except EndpointError as exc:
            decision.error = str(exc)
            return None
        decision.samples.append(raw)
        try:
            action = parse_llm_action(raw, legal)
            decision.candidates.append(action)
            return action
        except ActionParseError as exc:
            decision.candidates.append(None)
            decision.error = str(exc)
    return None


def decide(config: PolicyConfig, observation: Observation, memory: "AgentMemory",
           endpoint) -> Decision:
    """Produce one action decision via the configured strategy."""
    legal = observation.legal_actions
    if not legal:
        raise AgentError("decide() requires at least one legal action")
    prompt = build_prompt(observation, config, memory)
    decision = Decision(action=legal[0].action)
    decision._legal = legal  # type: ignore[attr-defined]

    if config.strategy in ("io", "cot"):
        action = _sample_action(endpoint, prompt, config, decision)
    elif config.strategy == "sc":
        parsed: list[Action] = []
        for _ in range(config.k):
            sample = _sample_action(endpoint, prompt, config, decision)
            if sample is not None:
                parsed.append(sample)
        if parsed:
            action = vote(parsed)
            for a in parsed:
                key = f"{a.kind}:{a.label}"
                decision.votes[key] = decision.votes.get(key, 0) + 1
        else:
            action = None
    else:  # tot
        proposals: list[Action] = []
        for _ in range(config.k):
            sample = _sample_action(endpoint, prompt, config, decision)
            if sample is not None and sample not in proposals:
                proposals.append(sample)
        action = None
        if proposals:
            action = proposals[0]
            eval_prompt = _evaluation_prompt(prompt, proposals, observation)
            try:
                decision.evaluation = endpoint.complete(
                    eval_prompt, DEFAULT_TEMPERATURE, config.max_tokens)
                action = parse_llm_action(decision.evaluation, legal)
                if action not in proposals:
                    action = proposals[0]
            except (EndpointError, ActionParseError):
                pass

    if action is None:
        decision.action = fallback_action(legal)
        decision.fallback = True
    else:
        decision.action = action
    del decision._legal  # type: ignore[attr-defined]
    return decision


def _evaluation_prompt(prompt: str, proposals: Sequence[Action], observation: Observation) -> str:
    lines = [prompt, "", "Candidate actions proposed:"]
    for action in proposals:
        label = action.name if action.kind == "move" else _switch_label(action, observation)
        lines.append(f'- {{"action": "{action.kind}", "name": "{label}"}}')
    lines.append("Evaluate the candidates and answer with the single best one, "
                 "using the same JSON format.")
    return "\n".join(lines)


def _switch_label(action: Action, observation: Observation) -> str:
    for c in observation.legal_actions:
        if c.action == action:
            return c.label
    return f"slot {action.slot}"


class AgentMemory:
    """Sliding window of (turn, action, feedback) entries for the prompt."""

    def __init__(self, maxlen: int = 64):
        self.entries: deque = deque(maxlen=maxlen)

    def clear(self) -> None:
        self.entries.clear()

    def add(self, turn: int, action_label: str, feedback: list[FeedbackItem]) -> None:
        self.entries.append({"turn": turn, "action": action_label, "feedback": feedback})

    def recent(self, window: int) -> list[dict]:
        return list(self.entries)[-window:]


class LLMAgent:
    """Harness policy that drives an LLM (or stand-in endpoint) each turn."""

    def __init__(self, config: PolicyConfig, endpoint, name: str = "llm"):
        self.config = config
        self.endpoint = endpoint
        self.name = name
        self.memory = AgentMemory()
        self.decisions: list[Decision] = []
        self._log_cursor = 0

    def start_battle(self, state: BattleState, side: int) -> None:
        self.memory.clear()
        self.decisions = []
        self._log_cursor = len(state.log)
        self._pending = None

    def choose(self, state: BattleState, side: int) -> Action:
        self._absorb_feedback(state, side)
        observation = describe(state, side, window=self.config.window)
        if self.config.kag != "none":
            observation.knowledge = annotate(state, side, self.config.kag)
        if self.config.icrl:
            observation.feedback = [
                item for entry in self.memory.recent(self.config.window)
                for item in entry["feedback"]
            ]
        if hasattr(self.endpoint, "bind"):
            self.endpoint.bind(state, side)
        decision = decide(self.config, observation, self.memory, self.endpoint)
        self.decisions.append(decision)
        label = (decision.action.name if decision.action.kind == "move"
                 else f"switch to {state.side(side).team[decision.action.slot].species}")
        self._pending = (state.field.turn_number, label)
        return decision.action

    def _absorb_feedback(self, state: BattleState, side: int) -> None:
        new_records = state.log[self._log_cursor:]
        self._log_cursor = len(state.log)
        pending = getattr(self, "_pending", None)
        for record in new_records:
            if record.kind != "turn":
                continue
            items = derive_feedback(None, record, state, side=side)
            if pending is not None:
                self.memory.add(record.turn, pending[1], items)
                pending = None
            else:
                self.memory.add(record.turn, "(forced switch)", items)
        self._pending = None
