// Scene construction: the view state becomes a flat list of draw commands.
// The canvas painter consumes the list verbatim, which keeps "what is on
// screen" assertable in tests without a real canvas.

import { routePosition } from './geometry.js';
import { ViewState } from './state.js';

export type DrawCmd =
  | { kind: 'tile'; x: number; y: number; tile: 'BUILDABLE' | 'PATH' | 'BLOCKED' | 'BASE' | 'SPAWN' }
  | { kind: 'grid-label'; x: number; y: number; text: string }
  | { kind: 'tower'; towerId: number; x: number; y: number; spec: string; color: string; selected: boolean }
  | { kind: 'range-circle'; towerId: number; x: number; y: number; radius: number }
  | { kind: 'sparkle'; towerId: number; index: number; angle: number; speedTier: number }
  | { kind: 'trap'; x: number; y: number; charges: number }
  | {
      kind: 'enemy';
      spawnIndex: number;
      x: number;
      y: number;
      variant: string;
      healthFrac: number;
      effects: string[];
    }
  | { kind: 'hover'; x: number; y: number; ok: boolean };

const TILE_CHARS: Record<string, 'BUILDABLE' | 'PATH' | 'BLOCKED' | 'BASE' | 'SPAWN'> = {
  '.': 'BUILDABLE',
  '>': 'PATH',
  '#': 'BLOCKED',
  B: 'BASE',
  S: 'SPAWN',
};

const SPARKLE_ORBIT_MS = [0, 2400, 1500, 800]; // firerate tier -> orbit period

export function buildDrawList(view: ViewState, nowMs: number): DrawCmd[] {
  const cmds: DrawCmd[] = [];
  const info = view.levelInfo;
  if (!info) return cmds;

  const grid = info.map.grid;
  for (let y = 0; y < info.map.height; y += 1) {
    for (let x = 0; x < info.map.width; x += 1) {
      cmds.push({ kind: 'tile', x, y, tile: TILE_CHARS[grid[y][x]] ?? 'BLOCKED' });
    }
  }
  if (info.visibility.coordinate_grid) {
    for (let x = 0; x < info.map.width; x += 1) {
      cmds.push({ kind: 'grid-label', x, y: -1, text: String(x) });
    }
    for (let y = 0; y < info.map.height; y += 1) {
      cmds.push({ kind: 'grid-label', x: -1, y, text: String(y) });
    }
  }

  for (const trap of view.traps) {
    cmds.push({ kind: 'trap', x: trap.cell[0], y: trap.cell[1], charges: trap.charges });
  }

  for (const tower of view.towers.values()) {
    const selected = view.selectedTowerId === tower.id;
    const color = (tower.owner && info.colors[tower.owner]) || '#9aa0a6';
    cmds.push({
      kind: 'tower',
      towerId: tower.id,
      x: tower.cell[0],
      y: tower.cell[1],
      spec: tower.spec,
      color,
      selected,
    });
    if (selected) {
      cmds.push({
        kind: 'range-circle',
        towerId: tower.id,
        x: tower.cell[0],
        y: tower.cell[1],
        radius: tower.effective.range,
      });
    }
    // Damage level = sparkle count; firerate level sets the orbit speed.
    const sparkles = tower.levels.DAMAGE;
    const tier = tower.levels.FIRERATE;
    const period = SPARKLE_ORBIT_MS[tier] || 0;
    for (let i = 0; i < sparkles; i += 1) {
      const base = (i / Math.max(1, sparkles)) * Math.PI * 2;
      const spin = period > 0 ? ((nowMs % period) / period) * Math.PI * 2 : 0;
      cmds.push({ kind: 'sparkle', towerId: tower.id, index: i, angle: base + spin, speedTier: tier });
    }
  }

  const routes = new Map(info.map.routes.map((r) => [r.id, r.waypoints]));
  for (const tracked of view.enemies.values()) {
    const waypoints = routes.get(tracked.data.route);
    if (!waypoints) continue;
    const progress = view.displayProgress(tracked, nowMs);
    const [x, y] = routePosition(waypoints, progress);
    const maxHealth = info.enemy_catalog.find((v) => v.id === tracked.data.variant)?.health ?? 0;
    const frac = maxHealth > 0 && Number.isFinite(tracked.data.health)
      ? Math.max(0, Math.min(1, tracked.data.health / maxHealth))
      : 1;
    cmds.push({
      kind: 'enemy',
      spawnIndex: tracked.data.spawn_index,
      x,
      y,
      variant: tracked.data.variant,
      healthFrac: frac,
      effects: tracked.data.effects,
    });
  }

  if (view.hoveredCell && view.armedSpecId) {
    const [hx, hy] = view.hoveredCell;
    const tileChar = grid[hy]?.[hx] ?? '#';
    const free = tileChar === '.' && view.towerAt(view.hoveredCell) === null;
    cmds.push({ kind: 'hover', x: hx, y: hy, ok: free });
  }
  return cmds;
}
