// Route geometry: where an enemy at a given progress sits on the map.

import { Cell } from './protocol.js';

export function routePosition(waypoints: Cell[], progress: number): [number, number] {
  const total = waypoints.length - 1;
  if (progress <= 0 || total <= 0) return [waypoints[0][0], waypoints[0][1]];
  if (progress >= total) return [waypoints[total][0], waypoints[total][1]];
  const index = Math.floor(progress);
  const frac = progress - index;
  const [x0, y0] = waypoints[index];
  const [x1, y1] = waypoints[index + 1];
  return [x0 + (x1 - x0) * frac, y0 + (y1 - y0) * frac];
}

export function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * Math.min(1, Math.max(0, t));
}
