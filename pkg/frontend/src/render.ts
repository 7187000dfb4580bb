/** DOM rendering for the battle screen. The server is the only rules engine;
 * everything here is a projection of the last fetched view. */

import { BattleClientState, PanelEntry } from "./state.js";
import { BattleView, OwnPokemon, RevealedOpponent } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function hpBar(percent: number): HTMLElement {
  const bar = el("div", "hp-bar");
  const fill = el("div", "hp-fill");
  fill.style.width = `${Math.max(0, Math.min(100, percent))}%`;
  if (percent <= 25) fill.classList.add("hp-low");
  else if (percent <= 50) fill.classList.add("hp-mid");
  bar.appendChild(fill);
  return bar;
}

function stagesText(stages: Record<string, number>): string {
  const parts = Object.entries(stages)
    .filter(([, v]) => v !== 0)
    .map(([stat, v]) => `${stat}${v > 0 ? "+" : ""}${v}`);
  return parts.length ? ` [${parts.join(" ")}]` : "";
}

function renderOwnMon(mon: OwnPokemon): HTMLElement {
  const card = el("div", mon.fainted ? "mon fainted" : mon.active ? "mon active" : "mon");
  const title = `${mon.species} (${mon.types.join("/")})` +
    (mon.status !== "none" ? ` [${mon.status}]` : "") + stagesText(mon.stages);
  card.appendChild(el("div", "mon-name", title + (mon.active ? " *" : "")));
  card.appendChild(hpBar(mon.hp_percent));
  card.appendChild(el("div", "mon-hp", `${mon.hp}/${mon.max_hp} HP (${mon.hp_percent}%)`));
  if (mon.active) {
    const moves = mon.moves
      .map((m) => `${m.name} (${m.type}${m.power ? `, ${m.power}` : ""})`)
      .join(", ");
    card.appendChild(el("div", "mon-moves", moves));
  }
  return card;
}

function renderOpponentMon(mon: RevealedOpponent): HTMLElement {
  const card = el("div", mon.fainted ? "mon fainted" : mon.active ? "mon active" : "mon");
  const title = `${mon.species} (${mon.types.join("/")})` +
    (mon.status && mon.status !== "none" ? ` [${mon.status}]` : "") + stagesText(mon.stages);
  card.appendChild(el("div", "mon-name", title + (mon.active ? " *" : "")));
  card.appendChild(hpBar(mon.hp_percent));
  card.appendChild(el("div", "mon-hp", `${mon.hp_percent}% HP`));
  if (mon.known_moves.length) {
    card.appendChild(el("div", "mon-moves", `seen: ${mon.known_moves.join(", ")}`));
  }
  return card;
}

export interface RenderTargets {
  you: HTMLElement;
  opponent: HTMLElement;
  field: HTMLElement;
  panel: HTMLElement;
  log: HTMLElement;
  status: HTMLElement;
}

export function renderView(
  targets: RenderTargets,
  client: BattleClientState,
  onAction: (label: string) => void,
): void {
  const view = client.view;
  if (!view) return;

  targets.you.replaceChildren();
  for (const mon of view.you.team) {
    targets.you.appendChild(renderOwnMon(mon));
  }

  targets.opponent.replaceChildren();
  for (const mon of view.opponent.revealed) {
    targets.opponent.appendChild(renderOpponentMon(mon));
  }
  if (view.opponent.unrevealed_count > 0) {
    targets.opponent.appendChild(
      el("div", "mon unknown", `${view.opponent.unrevealed_count} unrevealed Pokemon`));
  }

  const weather = view.field.weather === "none"
    ? "clear" : `${view.field.weather} (${view.field.weather_turns})`;
  const hazards = (h: Record<string, number>) =>
    Object.entries(h).filter(([, n]) => n > 0).map(([k, n]) => `${k} x${n}`).join(", ") || "none";
  targets.field.textContent =
    `Turn ${view.field.turn_number} | weather: ${weather} | ` +
    `your hazards: ${hazards(view.you.hazards)} | opposing hazards: ${hazards(view.opponent.hazards)}`;

  renderPanel(targets.panel, client.panel(), onAction);

  targets.log.replaceChildren();
  for (const line of client.logLines.slice(-40)) {
    targets.log.appendChild(el("div", "log-line", line));
  }
  targets.log.scrollTop = targets.log.scrollHeight;

  const summary = client.endSummary();
  if (summary) {
    targets.status.textContent = summary;
  } else if (view.phase === "awaiting_forced_switch" && view.your_turn) {
    targets.status.textContent = "Your Pokemon fainted: choose a replacement.";
  } else if (client.pending !== null) {
    targets.status.textContent = "Waiting for the opponent...";
  } else {
    targets.status.textContent = "Choose your action.";
  }
}

function renderPanel(
  panel: HTMLElement, entries: PanelEntry[], onAction: (label: string) => void,
): void {
  panel.replaceChildren();
  for (const entry of entries) {
    const button = el("button", `action ${entry.kind}`, entry.display);
    button.disabled = !entry.enabled;
    button.addEventListener("click", () => onAction(entry.label));
    panel.appendChild(button);
  }
}

export function showError(targets: RenderTargets, message: string): void {
  targets.status.textContent = message;
}
