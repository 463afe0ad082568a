// User actions to wire intents. Pure mapping; the server is the only
// authority, so local gating is a convenience, never a rule.

import { Cell, IntentType, TrackName } from './protocol.js';
import { ViewState } from './state.js';

export type UiAction =
  | { kind: 'hotkey'; key: string }
  | { kind: 'build-button'; specId: string }
  | { kind: 'cell-click'; cell: Cell }
  | { kind: 'upgrade-click'; towerId: number; track: TrackName }
  | { kind: 'sell-click'; towerId: number }
  | { kind: 'ready-click' }
  | { kind: 'chat-submit'; text: string };

export interface Intent {
  type: IntentType;
  payload: Record<string, unknown>;
}

export interface ActionEffect {
  intent: Intent | null;
  armSpec?: string | null; // change the armed build spec
  select?: number | null; // change the local tower selection
  toggleReady?: boolean;
}

export function mapAction(view: ViewState, action: UiAction): ActionEffect {
  const observer = view.isObserver();

  switch (action.kind) {
    case 'hotkey': {
      if (observer) return { intent: null };
      const specs = view.myAssignedSpecs();
      const index = Number.parseInt(action.key, 10) - 1;
      if (Number.isNaN(index) || index < 0 || index >= specs.length) return { intent: null };
      const spec = specs[index];
      return { intent: null, armSpec: view.armedSpecId === spec ? null : spec };
    }
    case 'build-button':
      if (observer) return { intent: null };
      return { intent: null, armSpec: view.armedSpecId === action.specId ? null : action.specId };
    case 'cell-click': {
      if (observer) return { intent: null };
      if (view.levelInfo?.mode === 'OBJECT_SELECTION') {
        return { intent: { type: 'SELECT', payload: { cell: action.cell } } };
      }
      if (view.armedSpecId) {
        return {
          intent: {
            type: 'PLACE',
            payload: { tower_type: view.armedSpecId, cell: action.cell },
          },
          armSpec: null,
        };
      }
      const tower = view.towerAt(action.cell);
      return { intent: null, select: tower ? tower.id : null };
    }
    case 'upgrade-click': {
      if (observer) return { intent: null };
      const tower = view.towers.get(action.towerId);
      if (!tower) return { intent: null };
      return {
        intent: { type: 'UPGRADE', payload: { cell: tower.cell, track: action.track } },
      };
    }
    case 'sell-click': {
      if (observer) return { intent: null };
      const tower = view.towers.get(action.towerId);
      if (!tower) return { intent: null };
      return { intent: { type: 'SELL', payload: { cell: tower.cell } }, select: null };
    }
    case 'ready-click':
      if (observer) return { intent: null };
      return { intent: { type: 'READY', payload: {} }, toggleReady: true };
    case 'chat-submit': {
      const text = action.text.trim();
      if (!text) return { intent: null };
      return { intent: { type: 'CHAT', payload: { text } } };
    }
  }
}
