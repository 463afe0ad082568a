// HUD view models. Pure functions from view state to panel descriptions;
// the DOM binder in main.ts renders them without further logic.

import { TrackName } from './protocol.js';
import { ViewState } from './state.js';

export interface BuildButton {
  specId: string;
  label: string; // spec id when tower names are hidden
  cost: number;
  hotkey: string;
  enabled: boolean;
  armed: boolean;
}

export interface UpgradeRow {
  track: TrackName;
  level: number;
  cost: number | null; // null at max level
  enabled: boolean;
}

export interface HudModel {
  connection: string;
  teamName: string;
  phase: string;
  countdownSeconds: number | null;
  money: number;
  health: number;
  score: number | null;
  killPoints: number;
  buildButtons: BuildButton[];
  spawnPreviews: { id: string; variants: string[] }[];
  chatEnabled: boolean;
  chatVisible: boolean;
  readyVisible: boolean;
  readyLatched: boolean;
  upgradeMenu: { towerId: number; rows: UpgradeRow[]; sellRefund: number; sellEnabled: boolean } | null;
  infoPanel: { title: string | null; lines: string[] } | null;
  intentLogVisible: boolean;
  lastError: string | null;
  roundBanner: string | null;
}

const TRACKS: TrackName[] = ['RANGE', 'DAMAGE', 'FIRERATE'];

export function buildHudModel(view: ViewState, connection: string): HudModel {
  const info = view.levelInfo;
  const observer = view.isObserver();
  const interactable =
    !observer &&
    (view.phase === 'PLANNING' ||
      (view.phase === 'ATTACK' && Boolean(info?.interact_during_attack)));

  const buildButtons: BuildButton[] = [];
  if (info && !observer) {
    const pool = view.myPool();
    view.myAssignedSpecs().forEach((specId, i) => {
      const entry = info.catalog.find((c) => c.id === specId);
      if (!entry) return;
      buildButtons.push({
        specId,
        label: entry.name ?? specId,
        cost: entry.cost,
        hotkey: String(i + 1),
        enabled: interactable && pool >= entry.cost,
        armed: view.armedSpecId === specId,
      });
    });
  }

  let upgradeMenu: HudModel['upgradeMenu'] = null;
  if (view.selectedTowerId !== null) {
    const tower = view.towers.get(view.selectedTowerId);
    if (tower) {
      const pool = view.myPool();
      upgradeMenu = {
        towerId: tower.id,
        rows: TRACKS.map((track) => ({
          track,
          level: tower.levels[track],
          cost: tower.upgrade_costs[track],
          enabled:
            interactable &&
            tower.upgrade_costs[track] !== null &&
            pool >= (tower.upgrade_costs[track] ?? Infinity),
        })),
        sellRefund: tower.sell_refund,
        sellEnabled: interactable && (!tower.owner || tower.owner === view.you?.slot),
      };
    }
  }

  let infoPanel: HudModel['infoPanel'] = null;
  if (view.selectedTowerId !== null && info) {
    const tower = view.towers.get(view.selectedTowerId);
    if (tower) {
      const entry = info.catalog.find((c) => c.id === tower.spec);
      const lines = [
        `range ${tower.effective.range.toFixed(2)}`,
        `damage ${tower.effective.damage.toFixed(2)}`,
        `firerate ${tower.effective.firerate.toFixed(2)}`,
      ];
      if (entry?.description) lines.push(entry.description);
      // Hidden tower names leave the title empty: icon and stats only.
      infoPanel = { title: entry?.name ?? null, lines };
    }
  }

  const lastRound = view.roundResults[view.roundResults.length - 1] ?? null;
  const lastError = view.errors[view.errors.length - 1] ?? null;
  return {
    connection,
    teamName: view.teamName,
    phase: view.phase ?? 'LOBBY',
    countdownSeconds: view.phase === 'PLANNING' ? Math.ceil(view.planningRemaining) : null,
    money: observer ? view.totalMoney() : view.myPool(),
    health: view.health,
    score: view.runningScore,
    killPoints: view.killPoints,
    buildButtons,
    spawnPreviews: info
      ? Object.entries(info.spawn_previews).map(([id, variants]) => ({ id, variants }))
      : [],
    chatEnabled: Boolean(info?.comm.text_chat) && !observerMuted(view),
    chatVisible: Boolean(info?.comm.text_chat ?? true),
    readyVisible: !observer && view.phase === 'PLANNING',
    readyLatched: view.readyLatched,
    upgradeMenu,
    infoPanel,
    intentLogVisible: observer,
    lastError: lastError ? `${lastError.code}: ${lastError.message}` : null,
    roundBanner: lastRound
      ? `${lastRound.outcome} - score ${Math.round(lastRound.score)}`
      : null,
  };
}

function observerMuted(_view: ViewState): boolean {
  return false; // observers may chat (moderator voice in the transcript)
}
