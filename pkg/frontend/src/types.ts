/** Payload types mirroring the battle service's human-view schema. */

export interface MoveInfo {
  name: string;
  type: string;
  category: string;
  power: number;
  accuracy: number;
}

export interface OwnPokemon {
  species: string;
  types: string[];
  hp: number;
  max_hp: number;
  hp_percent: number;
  status: string;
  stages: Record<string, number>;
  fainted: boolean;
  active: boolean;
  ability: string;
  moves: MoveInfo[];
}

export interface RevealedOpponent {
  species: string;
  types: string[];
  hp_percent: number;
  status: string;
  stages: Record<string, number>;
  fainted: boolean;
  active: boolean;
  known_moves: string[];
}

export interface LegalAction {
  kind: "move" | "switch";
  label: string;
  display: string;
}

export interface FieldInfo {
  weather: string;
  weather_turns: number;
  turn_number: number;
}

export interface BattleView {
  battle_id: string;
  phase: string;
  turn: number;
  your_turn: boolean;
  you: {
    active_index: number;
    team: OwnPokemon[];
    hazards: Record<string, number>;
  };
  opponent: {
    revealed: RevealedOpponent[];
    unrevealed_count: number;
    hazards: Record<string, number>;
  };
  field: FieldInfo;
  legal_actions: LegalAction[];
  finished: boolean;
  winner: "you" | "opponent" | "draw" | null;
  scores: [number, number] | null;
}

export interface TurnEventPayload {
  type: string;
  [key: string]: unknown;
}

export interface ServerEvent {
  type: "state" | "turn" | "end";
  state?: BattleView;
  record?: { turn: number; kind: string; events: TurnEventPayload[] };
  winner?: string;
  scores?: [number, number];
}

/** The only keys the schema allows on a revealed opposing Pokemon. */
export const ALLOWED_OPPONENT_KEYS: ReadonlySet<string> = new Set([
  "species", "types", "hp_percent", "status", "stages", "fainted",
  "active", "known_moves",
]);

/** The only keys the schema allows on the opponent section itself. */
export const ALLOWED_OPPONENT_SECTION_KEYS: ReadonlySet<string> = new Set([
  "revealed", "unrevealed_count", "hazards",
]);
