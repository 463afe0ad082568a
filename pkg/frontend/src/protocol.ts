// Wire schema shared with the session server. Every frame is one JSON
// object: { seq, type, room, payload }.

export const INTENT_TYPES = [
  'JOIN',
  'SET_TEAM_NAME',
  'CHAT',
  'PLACE',
  'SELL',
  'UPGRADE',
  'READY',
  'SELECT',
  'PING',
] as const;
export type IntentType = (typeof INTENT_TYPES)[number];

export type ServerMessageType =
  | 'LOBBY_STATE'
  | 'GAME_SNAPSHOT'
  | 'GAME_DELTA'
  | 'CHAT_RELAY'
  | 'ERROR'
  | 'ROUND_RESULT'
  | 'LEADERBOARD';

export interface WireMessage {
  seq: number;
  type: string;
  room: string;
  payload: Record<string, unknown>;
}

export type Cell = [number, number];
export type TrackName = 'RANGE' | 'DAMAGE' | 'FIRERATE';
export type PhaseName = 'PLANNING' | 'ATTACK' | 'ENDED';

export interface WireTower {
  id: number;
  spec: string;
  owner: string;
  cell: Cell;
  levels: Record<TrackName, number>;
  effective: { range: number; damage: number; firerate: number };
  upgrade_costs: Record<TrackName, number | null>;
  sell_refund: number;
}

export interface WireEnemy {
  spawn_index: number;
  variant: string;
  route: string;
  progress: number;
  health: number;
  effects: string[];
}

export interface WireTrap {
  cell: Cell;
  charges: number;
  owner_tower: number;
}

export interface WireState {
  level: number;
  round: number;
  mode: string;
  phase: PhaseName;
  tick: number;
  planning_remaining: number;
  money: Record<string, number>;
  health: number;
  kill_points: number;
  outcome: string;
  ready: Record<string, boolean>;
  towers: WireTower[];
  traps: WireTrap[];
  enemies: WireEnemy[];
}

export interface CatalogEntry {
  id: string;
  archetype: string;
  cost: number;
  range: number;
  damage: number;
  firerate: number;
  name?: string;
  description?: string;
}

export interface EnemyCatalogEntry {
  id: string;
  health: number;
  speed: number;
  points: number;
  bounty: number;
}

export interface LevelInfo {
  mode: string;
  level: number;
  round: number;
  level_name: string;
  planning_seconds: number;
  interact_during_attack: boolean;
  map: {
    width: number;
    height: number;
    grid: string[];
    routes: { id: string; waypoints: Cell[] }[];
    base: Cell;
  };
  catalog: CatalogEntry[];
  enemy_catalog: EnemyCatalogEntry[];
  assignments: Record<string, string[]>;
  colors: Record<string, string>;
  visibility: {
    tower_names: boolean;
    tower_descriptions: boolean;
    coordinate_grid: boolean;
    spawn_preview: boolean;
  };
  comm: { text_chat: boolean; voice: boolean; push_to_talk: boolean };
  spawn_previews: Record<string, string[]>;
  score_mode: string;
}

export interface SnapshotPayload {
  team_name: string;
  state: WireState | null;
  level_info: LevelInfo | null;
}

export interface WireEvent {
  kind: string;
  tick: number;
  details: Record<string, unknown>;
}

export interface SyncBlock {
  tick: number;
  phase: PhaseName;
  money: Record<string, number>;
  health: number;
  kill_points: number;
  running_score: number | null;
  enemies: WireEnemy[];
}

export interface DeltaPayload {
  tick: number;
  events: WireEvent[];
  planning_remaining?: number;
  ready?: Record<string, boolean>;
  sync?: SyncBlock;
  re?: number;
  by?: string;
  pong?: boolean;
}

export interface LobbyPlayer {
  slot: string | null;
  name: string;
  color: string;
  host: boolean;
  connected: boolean;
}

export interface LobbyPayload {
  team_name: string;
  session_phase: string;
  config_name: string;
  mode: string;
  level: number;
  round: number;
  players: LobbyPlayer[];
  observers: string[];
  slots_total: number;
  you?: { slot: string | null; name: string; color: string; token: string; role: string };
}

export interface RoundResultPayload {
  level: number;
  round: number;
  outcome: string;
  score: number;
  breakdown: {
    unspent: number;
    points: number;
    health: number;
    kills: number;
    leaks: number;
    bounties: number;
  };
  digest: string;
  team_name: string;
}

export interface ErrorPayload {
  code: string;
  message: string;
  re?: number;
}

export function encodeMessage(message: WireMessage): string {
  return JSON.stringify(message);
}

export function decodeMessage(raw: string): WireMessage {
  const parsed = JSON.parse(raw) as WireMessage;
  if (typeof parsed.seq !== 'number' || typeof parsed.type !== 'string') {
    throw new Error('malformed wire message');
  }
  return parsed;
}
