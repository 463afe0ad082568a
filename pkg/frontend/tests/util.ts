// Fixture builders mirroring the server's wire schema.

import { SocketLike } from '../src/net.js';
import {
  LevelInfo,
  SnapshotPayload,
  WireEnemy,
  WireMessage,
  WireState,
  WireTower,
} from '../src/protocol.js';
import { ViewState } from '../src/state.js';

export function levelInfo(overrides: Partial<LevelInfo> = {}): LevelInfo {
  return {
    mode: 'TOWER_DEFENSE',
    level: 0,
    round: 0,
    level_name: 'lane',
    planning_seconds: 120,
    interact_during_attack: false,
    map: {
      width: 8,
      height: 6,
      grid: ['........', 'S>>>>>>B', '........', '........', '........', '........'],
      routes: [{ id: 'lane', waypoints: [0, 1, 2, 3, 4, 5, 6, 7].map((x) => [x, 1]) as [number, number][] }],
      base: [7, 1],
    },
    catalog: [
      { id: 'basic', archetype: 'BASIC', cost: 200, range: 3, damage: 10, firerate: 1, name: 'Crossbow' },
      { id: 'slow', archetype: 'SLOW', cost: 225, range: 2.5, damage: 2, firerate: 0.9, name: 'Frost Gem' },
    ],
    enemy_catalog: [{ id: 'grunt', health: 40, speed: 1, points: 10, bounty: 15 }],
    assignments: { p1: ['basic', 'slow'], p2: ['slow'] },
    colors: { p1: '#e6194b', p2: '#4363d8' },
    visibility: { tower_names: true, tower_descriptions: true, coordinate_grid: true, spawn_preview: true },
    comm: { text_chat: true, voice: false, push_to_talk: false },
    spawn_previews: { s1: ['grunt', 'grunt'] },
    score_mode: 'LINEAR',
    ...overrides,
  };
}

export function tower(overrides: Partial<WireTower> = {}): WireTower {
  return {
    id: 1,
    spec: 'basic',
    owner: 'p1',
    cell: [2, 2],
    levels: { RANGE: 0, DAMAGE: 0, FIRERATE: 0 },
    effective: { range: 3, damage: 10, firerate: 1 },
    upgrade_costs: { RANGE: 100, DAMAGE: 100, FIRERATE: 100 },
    sell_refund: 200,
    ...overrides,
  };
}

export function enemy(overrides: Partial<WireEnemy> = {}): WireEnemy {
  return {
    spawn_index: 0,
    variant: 'grunt',
    route: 'lane',
    progress: 2.0,
    health: 40,
    effects: [],
    ...overrides,
  };
}

export function wireState(overrides: Partial<WireState> = {}): WireState {
  return {
    level: 0,
    round: 0,
    mode: 'TOWER_DEFENSE',
    phase: 'PLANNING',
    tick: 10,
    planning_remaining: 100,
    money: { team: 2000 },
    health: 10,
    kill_points: 0,
    outcome: 'ONGOING',
    ready: { p1: false, p2: false },
    towers: [],
    traps: [],
    enemies: [],
    ...overrides,
  };
}

let seqCounter = 0;

export function msg(type: string, payload: Record<string, unknown>): WireMessage {
  seqCounter += 1;
  return { seq: seqCounter, type, room: 'TEST01', payload };
}

export function resetSeq(): void {
  seqCounter = 0;
}

export function snapshotMsg(
  state: Partial<WireState> = {},
  info: Partial<LevelInfo> | null = {},
): WireMessage {
  const payload: SnapshotPayload = {
    team_name: 'test team',
    state: wireState(state),
    level_info: info === null ? null : levelInfo(info),
  };
  return msg('GAME_SNAPSHOT', payload as unknown as Record<string, unknown>);
}

export function viewWith(
  state: Partial<WireState> = {},
  info: Partial<LevelInfo> = {},
  you: { slot: string | null; role: string } = { slot: 'p1', role: 'PLAYER' },
): ViewState {
  const view = new ViewState();
  view.you = { slot: you.slot, name: 'tester', color: '#e6194b', token: 't', role: you.role };
  view.apply(snapshotMsg(state, info), 1000);
  return view;
}

export class FakeSocket implements SocketLike {
  sentFrames: string[] = [];
  onmessage: ((event: { data: string }) => void) | null = null;
  onopen: (() => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: ((err: unknown) => void) | null = null;

  send(data: string): void {
    this.sentFrames.push(data);
  }

  close(): void {
    this.onclose?.();
  }

  open(): void {
    this.onopen?.();
  }

  push(message: WireMessage): void {
    this.onmessage?.({ data: JSON.stringify(message) });
  }
}
