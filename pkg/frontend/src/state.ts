// Client view state: the latest snapshot merged with subsequent deltas.
// Everything here is derived from server messages plus local UI selection;
// no game rule is ever evaluated locally.

import { lerp } from './geometry.js';
import {
  Cell,
  DeltaPayload,
  ErrorPayload,
  LevelInfo,
  LobbyPayload,
  PhaseName,
  RoundResultPayload,
  SnapshotPayload,
  SyncBlock,
  WireEnemy,
  WireMessage,
  WireState,
  WireTower,
} from './protocol.js';

export interface ChatLine {
  name: string;
  slot: string | null;
  color: string;
  text: string;
  at: number;
}

export interface TrackedEnemy {
  data: WireEnemy;
  prevProgress: number;
  prevAt: number;
  currProgress: number;
  currAt: number;
}

export interface UiError {
  code: string;
  message: string;
  re?: number;
  at: number;
}

export interface IntentLogLine {
  by: string;
  kinds: string[];
  tick: number;
}

export class ViewState {
  lobby: LobbyPayload | null = null;
  you: LobbyPayload['you'] | null = null;
  teamName = '';
  levelInfo: LevelInfo | null = null;

  phase: PhaseName | null = null;
  outcome = 'ONGOING';
  tick = 0;
  planningRemaining = 0;
  ready: Record<string, boolean> = {};
  money: Record<string, number> = {};
  health = 0;
  killPoints = 0;
  runningScore: number | null = null;

  towers = new Map<number, WireTower>();
  traps: { cell: Cell; charges: number }[] = [];
  enemies = new Map<number, TrackedEnemy>();

  chat: ChatLine[] = [];
  errors: UiError[] = [];
  intentLog: IntentLogLine[] = [];
  roundResults: RoundResultPayload[] = [];
  leaderboard: Record<string, unknown>[] = [];

  // Local-only UI state.
  hoveredCell: Cell | null = null;
  selectedTowerId: number | null = null;
  armedSpecId: string | null = null;
  readyLatched = false;

  apply(message: WireMessage, nowMs: number): void {
    switch (message.type) {
      case 'LOBBY_STATE': {
        const payload = message.payload as unknown as LobbyPayload;
        this.lobby = payload;
        this.teamName = payload.team_name;
        if (payload.you) this.you = payload.you;
        break;
      }
      case 'GAME_SNAPSHOT':
        this.applySnapshot(message.payload as unknown as SnapshotPayload, nowMs);
        break;
      case 'GAME_DELTA':
        this.applyDelta(message.payload as unknown as DeltaPayload, nowMs);
        break;
      case 'CHAT_RELAY': {
        const p = message.payload as { name: string; slot: string | null; color: string; text: string };
        this.chat.push({ ...p, at: nowMs });
        break;
      }
      case 'ERROR': {
        const p = message.payload as unknown as ErrorPayload;
        this.errors.push({ code: p.code, message: p.message, re: p.re, at: nowMs });
        break;
      }
      case 'ROUND_RESULT':
        this.roundResults.push(message.payload as unknown as RoundResultPayload);
        this.readyLatched = false;
        break;
      case 'LEADERBOARD':
        this.leaderboard = (message.payload as { entries: Record<string, unknown>[] }).entries;
        break;
      default:
        break;
    }
  }

  private applySnapshot(payload: SnapshotPayload, nowMs: number): void {
    this.teamName = payload.team_name;
    if (payload.level_info) this.levelInfo = payload.level_info;
    const state = payload.state;
    if (!state) return;
    const newRound = this.phase === 'ENDED' || state.tick < this.tick;
    this.syncScalars(state);
    this.towers = new Map(state.towers.map((t) => [t.id, t]));
    this.traps = state.traps.map((t) => ({ cell: t.cell, charges: t.charges }));
    this.mergeEnemies(state.enemies, nowMs);
    if (newRound) {
      this.selectedTowerId = null;
      this.readyLatched = false;
    }
  }

  private applyDelta(payload: DeltaPayload, nowMs: number): void {
    this.tick = payload.tick;
    if (payload.planning_remaining !== undefined) {
      this.planningRemaining = payload.planning_remaining;
    }
    if (payload.ready) this.ready = payload.ready;
    for (const event of payload.events) {
      this.applyEvent(event.kind, event.details);
    }
    if (payload.by) {
      const kinds = payload.events.map((e) => e.kind);
      if (kinds.length) this.intentLog.push({ by: payload.by, kinds, tick: payload.tick });
    }
    if (payload.sync) this.applySync(payload.sync, nowMs);
  }

  private applyEvent(kind: string, details: Record<string, unknown>): void {
    switch (kind) {
      case 'PLACED':
      case 'UPGRADED': {
        const tower = details['tower'] as WireTower | undefined;
        if (tower) this.towers.set(tower.id, tower);
        if (kind === 'PLACED' && details['trap_cell']) {
          this.traps.push({ cell: details['trap_cell'] as Cell, charges: 0 });
        }
        break;
      }
      case 'SOLD': {
        const id = details['tower_id'] as number;
        this.towers.delete(id);
        if (this.selectedTowerId === id) this.selectedTowerId = null;
        break;
      }
      case 'SPAWNED': {
        const enemy: WireEnemy = {
          spawn_index: details['spawn_index'] as number,
          variant: details['variant_id'] as string,
          route: details['route_id'] as string,
          progress: 0,
          health: Number.NaN, // authoritative value arrives with the next sync
          effects: [],
        };
        this.enemies.set(enemy.spawn_index, {
          data: enemy,
          prevProgress: 0,
          prevAt: 0,
          currProgress: 0,
          currAt: 0,
        });
        break;
      }
      case 'KILLED':
      case 'LEAKED':
        this.enemies.delete(details['spawn_index'] as number);
        break;
      case 'PHASE_CHANGED':
        this.phase = details['phase'] as PhaseName;
        if (this.phase !== 'PLANNING') this.planningRemaining = 0;
        break;
      case 'ROUND_ENDED':
        this.outcome = details['outcome'] as string;
        break;
      default:
        break;
    }
  }

  private applySync(sync: SyncBlock, nowMs: number): void {
    this.phase = sync.phase;
    this.money = sync.money;
    this.health = sync.health;
    this.killPoints = sync.kill_points;
    this.runningScore = sync.running_score;
    this.mergeEnemies(sync.enemies, nowMs);
  }

  private syncScalars(state: WireState): void {
    this.phase = state.phase;
    this.outcome = state.outcome;
    this.tick = state.tick;
    this.planningRemaining = state.planning_remaining;
    this.ready = state.ready;
    this.money = state.money;
    this.health = state.health;
    this.killPoints = state.kill_points;
  }

  private mergeEnemies(enemies: WireEnemy[], nowMs: number): void {
    const seen = new Set<number>();
    for (const enemy of enemies) {
      seen.add(enemy.spawn_index);
      const tracked = this.enemies.get(enemy.spawn_index);
      if (tracked) {
        tracked.prevProgress = tracked.currProgress;
        tracked.prevAt = tracked.currAt;
        tracked.currProgress = enemy.progress;
        tracked.currAt = nowMs;
        tracked.data = enemy;
      } else {
        this.enemies.set(enemy.spawn_index, {
          data: enemy,
          prevProgress: enemy.progress,
          prevAt: nowMs,
          currProgress: enemy.progress,
          currAt: nowMs,
        });
      }
    }
    for (const key of [...this.enemies.keys()]) {
      if (!seen.has(key)) this.enemies.delete(key);
    }
  }

  // Linear interpolation between the last two authoritative updates; the
  // display trails the server by one update interval.
  displayProgress(tracked: TrackedEnemy, nowMs: number): number {
    const interval = tracked.currAt - tracked.prevAt;
    if (interval <= 0) return tracked.currProgress;
    const t = (nowMs - tracked.currAt) / interval;
    return lerp(tracked.prevProgress, tracked.currProgress, t);
  }

  totalMoney(): number {
    return Object.values(this.money).reduce((a, b) => a + b, 0);
  }

  myPool(): number {
    if (!this.you?.slot) return this.totalMoney();
    if (this.money[this.you.slot] !== undefined) return this.money[this.you.slot];
    return this.totalMoney();
  }

  towerAt(cell: Cell): WireTower | null {
    for (const tower of this.towers.values()) {
      if (tower.cell[0] === cell[0] && tower.cell[1] === cell[1]) return tower;
    }
    return null;
  }

  isObserver(): boolean {
    return this.you?.role === 'OBSERVER';
  }

  myAssignedSpecs(): string[] {
    if (!this.levelInfo || !this.you?.slot) return [];
    return this.levelInfo.assignments[this.you.slot] ?? [];
  }
}
