/** Client-side battle state: pure logic, no DOM, fully unit-testable.
 *
 * The server is authoritative; this holder only mirrors the latest view,
 * derives the action panel from it, and guards that every submission uses a
 * label from the most recent fetch and that no out-of-schema opponent data
 * ever reaches rendering.
 */

import {
  ALLOWED_OPPONENT_KEYS,
  ALLOWED_OPPONENT_SECTION_KEYS,
  BattleView,
  LegalAction,
  TurnEventPayload,
} from "./types.js";

export interface PanelEntry {
  kind: "move" | "switch";
  label: string;
  display: string;
  enabled: boolean;
}

/** Field names that would leak hidden information if they ever appeared. */
export function unknownOpponentFields(view: BattleView): string[] {
  const leaks: string[] = [];
  const section = view.opponent as unknown as Record<string, unknown>;
  for (const key of Object.keys(section)) {
    if (!ALLOWED_OPPONENT_SECTION_KEYS.has(key)) {
      leaks.push(`opponent.${key}`);
    }
  }
  for (const mon of view.opponent.revealed) {
    for (const key of Object.keys(mon as unknown as Record<string, unknown>)) {
      if (!ALLOWED_OPPONENT_KEYS.has(key)) {
        leaks.push(`opponent.revealed[${mon.species}].${key}`);
      }
    }
  }
  return leaks;
}

export class BattleClientState {
  view: BattleView | null = null;
  /** Label submitted and not yet answered; panel disabled while set. */
  pending: string | null = null;
  logLines: string[] = [];
  schemaViolations: string[] = [];

  applyView(view: BattleView): void {
    const leaks = unknownOpponentFields(view);
    if (leaks.length > 0) {
      // never render unexpected fields; record and refuse them
      this.schemaViolations.push(...leaks);
    }
    this.view = view;
    this.pending = null;
  }

  /** Action buttons derived strictly from the last fetched view. */
  panel(): PanelEntry[] {
    if (!this.view || this.view.finished) {
      return [];
    }
    const awaitingUs = this.view.your_turn && this.pending === null;
    return this.view.legal_actions.map((action: LegalAction) => ({
      kind: action.kind,
      label: action.label,
      display: action.display,
      enabled: awaitingUs,
    }));
  }

  /** True only for labels present in the most recent state fetch. */
  canSubmit(label: string): boolean {
    if (!this.view || this.view.finished || this.pending !== null) {
      return false;
    }
    return this.view.legal_actions.some((a) => a.label === label);
  }

  markPending(label: string): void {
    this.pending = label;
  }

  clearPending(): void {
    this.pending = null;
  }

  appendTurnEvents(events: TurnEventPayload[]): void {
    for (const event of events) {
      const line = describeEvent(event);
      if (line) {
        this.logLines.push(line);
      }
    }
  }

  endSummary(): string | null {
    if (!this.view || !this.view.finished) {
      return null;
    }
    const scores = this.view.scores;
    const scoreText = scores ? ` (battle score ${scores[0]} - ${scores[1]})` : "";
    if (this.view.winner === "you") return `You won!${scoreText}`;
    if (this.view.winner === "opponent") return `You lost.${scoreText}`;
    return `Draw.${scoreText}`;
  }
}

/** Human-readable line for one public turn event. */
export function describeEvent(event: TurnEventPayload): string {
  const who = event.side === 0 ? "Your" : "Opposing";
  switch (event.type) {
    case "move":
      return `${who} ${event.pokemon} used ${event.move}.`;
    case "switch":
      return `${who} side sent out ${event.pokemon}${event.forced ? " (forced)" : ""}.`;
    case "damage": {
      const suffix = event.side === 0
        ? `${event.hp_left} HP left`
        : `${Math.round(((event.hp_left_fraction as number) ?? 0) * 100)}% left`;
      return `${who} ${event.pokemon} took damage (${suffix}).`;
    }
    case "heal":
      return `${who} ${event.pokemon} recovered HP.`;
    case "immune":
      return `It had no effect on ${who.toLowerCase()} ${event.pokemon}.`;
    case "miss":
      return `${who} ${event.pokemon}'s ${event.move} missed.`;
    case "faint":
      return `${who} ${event.pokemon} fainted!`;
    case "status":
      return `${who} ${event.pokemon} was afflicted by ${event.status}.`;
    case "boost": {
      const applied = (event.applied as number) ?? 0;
      if (applied === 0) return "";
      const direction = applied > 0 ? "rose" : "fell";
      return `${who} ${event.pokemon}'s ${event.stat} ${direction}.`;
    }
    case "weather":
      return `The weather became ${event.weather}.`;
    case "hazard_set":
      return `Hazards (${event.hazard}) were laid on ${event.side === 0 ? "your" : "the opposing"} side.`;
    case "win":
      return "";
    default:
      return "";
  }
}
