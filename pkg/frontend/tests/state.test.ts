import { describe, expect, it, beforeEach } from 'vitest';

import { GameConnection } from '../src/net.js';
import { enemy, FakeSocket, msg, resetSeq, snapshotMsg, tower, viewWith } from './util.js';

beforeEach(resetSeq);

describe('GameConnection ordering', () => {
  it('buffers out-of-order messages until the gap fills', () => {
    const socket = new FakeSocket();
    const conn = new GameConnection('TEST01', 'ws://x', () => socket);
    const seen: number[] = [];
    conn.onMessage((m) => seen.push(m.seq));

    socket.push({ seq: 2, type: 'CHAT_RELAY', room: 'TEST01', payload: {} });
    expect(seen).toEqual([]); // waiting for seq 1
    socket.push({ seq: 1, type: 'CHAT_RELAY', room: 'TEST01', payload: {} });
    expect(seen).toEqual([1, 2]);
    socket.push({ seq: 4, type: 'CHAT_RELAY', room: 'TEST01', payload: {} });
    socket.push({ seq: 3, type: 'CHAT_RELAY', room: 'TEST01', payload: {} });
    expect(seen).toEqual([1, 2, 3, 4]);
  });

  it('drops duplicates and records everything sent', () => {
    const socket = new FakeSocket();
    const conn = new GameConnection('TEST01', 'ws://x', () => socket);
    const seen: number[] = [];
    conn.onMessage((m) => seen.push(m.seq));
    socket.push({ seq: 1, type: 'ERROR', room: 'TEST01', payload: {} });
    socket.push({ seq: 1, type: 'ERROR', room: 'TEST01', payload: {} });
    expect(seen).toEqual([1]);

    conn.sendIntent('CHAT', { text: 'hi' });
    conn.sendIntent('READY');
    expect(conn.sent.map((m) => m.type)).toEqual(['CHAT', 'READY']);
    expect(conn.sent.map((m) => m.seq)).toEqual([1, 2]);
    expect(socket.sentFrames).toHaveLength(2);
  });
});

describe('ViewState merging', () => {
  it('populates towers and enemies from a snapshot', () => {
    const view = viewWith({ towers: [tower()], enemies: [enemy()] });
    expect(view.towers.size).toBe(1);
    expect(view.enemies.size).toBe(1);
    expect(view.phase).toBe('PLANNING');
    expect(view.totalMoney()).toBe(2000);
  });

  it('applies PLACED and SOLD deltas incrementally', () => {
    const view = viewWith();
    const placed = tower({ id: 7, cell: [4, 3] });
    view.apply(
      msg('GAME_DELTA', {
        tick: 11,
        events: [{ kind: 'PLACED', tick: 11, details: { tower_id: 7, tower: placed } }],
      }),
      1100,
    );
    expect(view.towers.get(7)?.cell).toEqual([4, 3]);

    view.selectedTowerId = 7;
    view.apply(
      msg('GAME_DELTA', {
        tick: 12,
        events: [{ kind: 'SOLD', tick: 12, details: { tower_id: 7 } }],
      }),
      1200,
    );
    // The tower is gone from the very next frame's state.
    expect(view.towers.has(7)).toBe(false);
    expect(view.selectedTowerId).toBeNull();
  });

  it('UPGRADED replaces the tower payload', () => {
    const view = viewWith({ towers: [tower({ id: 3 })] });
    const upgraded = tower({ id: 3, levels: { RANGE: 0, DAMAGE: 2, FIRERATE: 0 } });
    view.apply(
      msg('GAME_DELTA', {
        tick: 20,
        events: [{ kind: 'UPGRADED', tick: 20, details: { tower_id: 3, tower: upgraded } }],
      }),
      1300,
    );
    expect(view.towers.get(3)?.levels.DAMAGE).toBe(2);
  });

  it('KILLED and LEAKED remove enemies; sync prunes and reppositions', () => {
    const view = viewWith({ enemies: [enemy({ spawn_index: 0 }), enemy({ spawn_index: 1 })] });
    view.apply(
      msg('GAME_DELTA', {
        tick: 30,
        events: [{ kind: 'KILLED', tick: 30, details: { spawn_index: 0 } }],
      }),
      2000,
    );
    expect([...view.enemies.keys()]).toEqual([1]);

    view.apply(
      msg('GAME_DELTA', {
        tick: 32,
        events: [],
        sync: {
          tick: 32,
          phase: 'ATTACK',
          money: { team: 2100 },
          health: 9,
          kill_points: 10,
          running_score: 2290,
          enemies: [enemy({ spawn_index: 1, progress: 3.5 })],
        },
      }),
      2100,
    );
    expect(view.enemies.get(1)?.currProgress).toBe(3.5);
    expect(view.health).toBe(9);
    expect(view.runningScore).toBe(2290);
  });

  it('interpolates linearly between the last two position reports', () => {
    const view = viewWith({ enemies: [enemy({ spawn_index: 5, progress: 2.0 })] });
    const sync = (progress: number, at: number) =>
      view.apply(
        msg('GAME_DELTA', {
          tick: at,
          events: [],
          sync: {
            tick: at, phase: 'ATTACK', money: {}, health: 10, kill_points: 0,
            running_score: null,
            enemies: [enemy({ spawn_index: 5, progress })],
          },
        }),
        at,
      );
    sync(2.0, 1000);
    sync(2.1, 1100); // 100 ms interval, forward 0.1 tiles
    const tracked = view.enemies.get(5)!;
    expect(view.displayProgress(tracked, 1100)).toBeCloseTo(2.0, 5);
    expect(view.displayProgress(tracked, 1150)).toBeCloseTo(2.05, 5);
    expect(view.displayProgress(tracked, 1200)).toBeCloseTo(2.1, 5);
    expect(view.displayProgress(tracked, 1500)).toBeCloseTo(2.1, 5); // clamped
  });

  it('tracks chat, errors and countdown updates', () => {
    const view = viewWith();
    view.apply(msg('CHAT_RELAY', { name: 'ann', slot: 'p1', color: '#e6194b', text: 'gogogo' }), 1);
    view.apply(msg('ERROR', { code: 'insufficient_funds', message: 'no', re: 4 }), 2);
    view.apply(msg('GAME_DELTA', { tick: 40, events: [], planning_remaining: 98.0, ready: { p1: true, p2: false } }), 3);
    expect(view.chat[0].text).toBe('gogogo');
    expect(view.errors[0].code).toBe('insufficient_funds');
    expect(view.planningRemaining).toBe(98);
    expect(view.ready.p1).toBe(true);
  });

  it('resets local selection when a new round snapshot arrives', () => {
    const view = viewWith({ tick: 500, phase: 'ATTACK' });
    view.selectedTowerId = 2;
    view.apply(
      msg('GAME_DELTA', {
        tick: 501,
        events: [{ kind: 'PHASE_CHANGED', tick: 501, details: { phase: 'ENDED' } }],
      }),
      5,
    );
    view.apply(snapshotMsg({ tick: 0, round: 1 }), 6);
    expect(view.selectedTowerId).toBeNull();
  });
});
