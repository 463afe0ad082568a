import { describe, expect, it } from 'vitest';

import { buildDrawList } from '../src/render.js';
import { enemy, tower, viewWith } from './util.js';

describe('draw list construction', () => {
  it('sparkle count equals the DAMAGE upgrade level', () => {
    for (const level of [0, 1, 2, 3]) {
      const view = viewWith({
        towers: [tower({ id: 1, levels: { RANGE: 0, DAMAGE: level, FIRERATE: 1 } })],
      });
      const sparkles = buildDrawList(view, 0).filter(
        (c) => c.kind === 'sparkle' && c.towerId === 1,
      );
      expect(sparkles).toHaveLength(level);
    }
  });

  it('draws every snapshot tower and enemy at its cell/progress and nothing else', () => {
    const view = viewWith({
      towers: [tower({ id: 1, cell: [2, 2] }), tower({ id: 2, cell: [5, 3], owner: 'p2' })],
      enemies: [enemy({ spawn_index: 0, progress: 2.5 })],
    });
    const cmds = buildDrawList(view, 0);
    const towers = cmds.filter((c) => c.kind === 'tower');
    const enemies = cmds.filter((c) => c.kind === 'enemy');
    expect(towers).toHaveLength(2);
    expect(enemies).toHaveLength(1);
    expect(towers.find((t) => t.kind === 'tower' && t.towerId === 1)).toMatchObject({ x: 2, y: 2 });
    expect(towers.find((t) => t.kind === 'tower' && t.towerId === 2)).toMatchObject({ x: 5, y: 3 });
    // Lane runs along y=1; progress 2.5 sits halfway between x=2 and x=3.
    expect(enemies[0]).toMatchObject({ x: 2.5, y: 1 });
  });

  it('outlines towers in their owner color', () => {
    const view = viewWith({ towers: [tower({ id: 1, owner: 'p2' })] });
    const cmd = buildDrawList(view, 0).find((c) => c.kind === 'tower');
    expect(cmd).toMatchObject({ color: '#4363d8' });
  });

  it('selected tower shows a range circle scaled by effective range', () => {
    const view = viewWith({
      towers: [tower({ id: 9, effective: { range: 4.6875, damage: 10, firerate: 1 } })],
    });
    view.selectedTowerId = 9;
    const circle = buildDrawList(view, 0).find((c) => c.kind === 'range-circle');
    expect(circle).toMatchObject({ towerId: 9, radius: 4.6875 });
    view.selectedTowerId = null;
    expect(buildDrawList(view, 0).some((c) => c.kind === 'range-circle')).toBe(false);
  });

  it('sparkles orbit faster at higher firerate tiers', () => {
    const view = viewWith({
      towers: [tower({ id: 1, levels: { RANGE: 0, DAMAGE: 1, FIRERATE: 3 } })],
    });
    const at0 = buildDrawList(view, 0).find((c) => c.kind === 'sparkle')!;
    const at100 = buildDrawList(view, 100).find((c) => c.kind === 'sparkle')!;
    expect(at0.kind === 'sparkle' && at100.kind === 'sparkle').toBe(true);
    if (at0.kind === 'sparkle' && at100.kind === 'sparkle') {
      expect(at100.angle).not.toBeCloseTo(at0.angle, 5);
      expect(at0.speedTier).toBe(3);
    }
  });

  it('coordinate labels follow the visibility flag', () => {
    const withLabels = viewWith({}, {});
    expect(buildDrawList(withLabels, 0).some((c) => c.kind === 'grid-label')).toBe(true);
    const without = viewWith({}, {
      visibility: {
        tower_names: true, tower_descriptions: true, coordinate_grid: false, spawn_preview: true,
      },
    });
    expect(buildDrawList(without, 0).some((c) => c.kind === 'grid-label')).toBe(false);
  });

  it('marks hovered buildable cells as placeable and occupied ones as not', () => {
    const view = viewWith({ towers: [tower({ cell: [2, 2] })] });
    view.armedSpecId = 'basic';
    view.hoveredCell = [3, 3];
    let hover = buildDrawList(view, 0).find((c) => c.kind === 'hover');
    expect(hover).toMatchObject({ ok: true });
    view.hoveredCell = [2, 2]; // occupied
    hover = buildDrawList(view, 0).find((c) => c.kind === 'hover');
    expect(hover).toMatchObject({ ok: false });
    view.hoveredCell = [2, 1]; // path tile
    hover = buildDrawList(view, 0).find((c) => c.kind === 'hover');
    expect(hover).toMatchObject({ ok: false });
  });

  it('renders nothing without a snapshot', () => {
    const view = viewWith();
    view.levelInfo = null;
    expect(buildDrawList(view, 0)).toEqual([]);
  });
});
