/** Battle screen wiring: one battle per page, server-driven via fetch + SSE. */

import { ArenaApi } from "./api.js";
import { BattleClientState } from "./state.js";
import { RenderTargets, renderView, showError } from "./render.js";
import { ServerEvent } from "./types.js";

const DEFAULT_BASE = `${location.protocol}//${location.hostname}:8000`;

function targets(): RenderTargets {
  const get = (id: string) => {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node;
  };
  return {
    you: get("you"),
    opponent: get("opponent"),
    field: get("field"),
    panel: get("panel"),
    log: get("log"),
    status: get("status"),
  };
}

async function start(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const api = new ArenaApi(params.get("api") ?? DEFAULT_BASE);
  const ui = targets();
  const client = new BattleClientState();
  let battleId = "";
  let eventCursor = 0;
  let unsubscribe: (() => void) | null = null;

  const redraw = () => renderView(ui, client, submit);

  async function submit(label: string): Promise<void> {
    if (!client.canSubmit(label)) {
      return; // stale click; panel will be re-rendered from the latest view
    }
    client.markPending(label);
    redraw();
    const result = await api.submitAction(battleId, label);
    if (result.ok && result.state) {
      client.applyView(result.state);
    } else {
      client.clearPending();
      showError(ui, `Action rejected: ${result.error ?? "unknown error"}`);
    }
    redraw();
  }

  function onEvent(event: ServerEvent): void {
    eventCursor += 1;
    if (event.type === "turn" && event.record) {
      client.appendTurnEvents(event.record.events);
    }
    if (event.state) {
      client.applyView(event.state);
    }
    redraw();
    if (event.type === "end") {
      unsubscribe?.();
      void revealDecisions();
    }
  }

  /** Post-battle review: the agent's decision traces open up after the end. */
  async function revealDecisions(): Promise<void> {
    try {
      const traces = await api.decisions(battleId);
      if (traces.length > 0) {
        client.logLines.push(
          `Post-battle review: ${traces.length} agent decision traces (in console).`);
        console.log("agent decision traces", traces);
        redraw();
      }
    } catch {
      // baseline agents keep no traces; nothing to reveal
    }
  }

  function onStreamError(): void {
    // dropped connection: resubscribe from the cursor and refetch the state
    unsubscribe?.();
    setTimeout(async () => {
      try {
        client.applyView(await api.getState(battleId));
        redraw();
        unsubscribe = api.subscribe(battleId, onEvent, onStreamError, eventCursor);
      } catch {
        showError(ui, "Connection lost; retrying...");
        setTimeout(onStreamError, 1000);
      }
    }, 250);
  }

  if (!(await api.health())) {
    showError(ui, `Battle service unreachable at ${api.baseUrl}. ` +
      "Start it with: pokearena serve --port 8000 --agent maxpower " +
      "(override with ?api=http://host:port)");
    return;
  }

  const agent = params.get("agent") ?? undefined;
  const seedParam = params.get("seed");
  const created = await api.createBattle({
    agent, seed: seedParam ? Number(seedParam) : undefined,
  });
  battleId = created.battleId;
  client.applyView(created.state);
  redraw();
  unsubscribe = api.subscribe(battleId, onEvent, onStreamError, 1);
}

start().catch((error) => {
  const status = document.getElementById("status");
  if (status) status.textContent = `Failed to start: ${error}`;
});
