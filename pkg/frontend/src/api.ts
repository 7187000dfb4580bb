/** Thin fetch/SSE client for the battle service API. */

import { BattleView, ServerEvent } from "./types.js";

export interface SubmitResult {
  ok: boolean;
  state?: BattleView;
  error?: string;
  legalActions?: string[];
}

export class ArenaApi {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(this.url("/healthz"));
      return response.ok;
    } catch {
      return false;
    }
  }

  async createBattle(options: { agent?: string; seed?: number } = {}): Promise<{
    battleId: string;
    state: BattleView;
  }> {
    const response = await fetch(this.url("/battles"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(options),
    });
    if (!response.ok) {
      throw new Error(`create battle failed: ${response.status}`);
    }
    const data = await response.json();
    return { battleId: data.battle_id, state: data.state };
  }

  async getState(battleId: string): Promise<BattleView> {
    const response = await fetch(this.url(`/battles/${battleId}/state`));
    if (!response.ok) {
      throw new Error(`state fetch failed: ${response.status}`);
    }
    return response.json();
  }

  async submitAction(battleId: string, label: string): Promise<SubmitResult> {
    const response = await fetch(this.url(`/battles/${battleId}/action`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ action: label }),
    });
    if (response.ok) {
      const data = await response.json();
      return { ok: true, state: data.state };
    }
    let error = `rejected (${response.status})`;
    let legalActions: string[] | undefined;
    try {
      const detail = (await response.json()).detail;
      if (typeof detail === "string") {
        error = detail;
      } else if (detail) {
        error = detail.error ?? error;
        legalActions = detail.legal_actions;
      }
    } catch {
      // body was not JSON; keep the status-based message
    }
    return { ok: false, error, legalActions };
  }

  async decisions(battleId: string): Promise<unknown[]> {
    const response = await fetch(this.url(`/battles/${battleId}/decisions`));
    if (!response.ok) {
      throw new Error(`decision traces unavailable: ${response.status}`);
    }
    return (await response.json()).decisions;
  }

  /** Live event subscription (browser EventSource). */
  subscribe(battleId: string, onEvent: (event: ServerEvent) => void,
            onError: () => void, since = 0): () => void {
    const source = new EventSource(
      this.url(`/battles/${battleId}/events?since=${since}`));
    source.onmessage = (message) => {
      onEvent(JSON.parse(message.data) as ServerEvent);
    };
    source.onerror = () => onError();
    return () => source.close();
  }

  /** One-shot drain of queued events (used by headless tests; no EventSource). */
  async drainEvents(battleId: string, since = 0): Promise<ServerEvent[]> {
    const response = await fetch(
      this.url(`/battles/${battleId}/events?since=${since}&wait=false`));
    const text = await response.text();
    const events: ServerEvent[] = [];
    for (const line of text.split("\n")) {
      if (line.startsWith("data: ")) {
        events.push(JSON.parse(line.slice(6)) as ServerEvent);
      }
    }
    return events;
  }
}
