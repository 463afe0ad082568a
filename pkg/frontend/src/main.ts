// Browser entry point: connects, wires input to intents, paints the scene
// at animation-frame rate and binds the HUD panels.

import { buildDrawList, DrawCmd } from './render.js';
import { buildHudModel, HudModel } from './hud.js';
import { mapAction, UiAction } from './input.js';
import { browserSocketFactory, GameConnection } from './net.js';
import { Cell } from './protocol.js';
import { ViewState } from './state.js';

const TILE = 34; // px per map cell
const MARGIN = 22; // coordinate label gutter

const TILE_COLORS: Record<string, string> = {
  BUILDABLE: '#2e7d32',
  PATH: '#8d6e63',
  BLOCKED: '#37474f',
  BASE: '#ffd54f',
  SPAWN: '#a1887f',
};

function query(name: string, fallback = ''): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

class ClientApp {
  private readonly view = new ViewState();
  private readonly conn: GameConnection;
  private readonly canvas: HTMLCanvasElement;
  private readonly ctx: CanvasRenderingContext2D;
  private readonly hudRoot: HTMLElement;
  private readonly chatLog: HTMLElement;
  private readonly chatInput: HTMLInputElement;
  private renderedChatLines = 0;

  constructor(room: string, name: string, role: 'PLAYER' | 'OBSERVER', token: string) {
    this.canvas = document.getElementById('board') as HTMLCanvasElement;
    this.ctx = this.canvas.getContext('2d')!;
    this.hudRoot = document.getElementById('hud')!;
    this.chatLog = document.getElementById('chat-log')!;
    this.chatInput = document.getElementById('chat-input') as HTMLInputElement;

    const wsUrl = `${window.location.protocol === 'https:' ? 'wss' : 'ws'}://${window.location.host}/ws`;
    this.conn = new GameConnection(room, wsUrl, browserSocketFactory);
    this.conn.onMessage((message) => {
      this.view.apply(message, performance.now());
      this.conn.player = this.view.you?.slot ?? null;
    });
    this.conn
      .whenOpen()
      .then(() => this.conn.join(name, role, token || undefined))
      .catch(() => undefined);

    this.canvas.addEventListener('click', (event) => {
      const cell = this.cellFromPointer(event);
      if (cell) this.dispatch({ kind: 'cell-click', cell });
    });
    this.canvas.addEventListener('mousemove', (event) => {
      this.view.hoveredCell = this.cellFromPointer(event);
    });
    window.addEventListener('keydown', (event) => {
      if (document.activeElement === this.chatInput) return;
      if (event.key >= '1' && event.key <= '9') {
        this.dispatch({ kind: 'hotkey', key: event.key });
      } else if (event.key === 'r' || event.key === 'R') {
        this.dispatch({ kind: 'ready-click' });
      } else if (event.key === 'Enter') {
        this.chatInput.focus();
      }
    });
    this.chatInput.addEventListener('keydown', (event) => {
      if (event.key === 'Enter') {
        this.dispatch({ kind: 'chat-submit', text: this.chatInput.value });
        this.chatInput.value = '';
        this.chatInput.blur();
      }
    });

    requestAnimationFrame(() => this.frame());
  }

  private dispatch(action: UiAction): void {
    const effect = mapAction(this.view, action);
    if (effect.armSpec !== undefined) this.view.armedSpecId = effect.armSpec;
    if (effect.select !== undefined) this.view.selectedTowerId = effect.select;
    if (effect.toggleReady) this.view.readyLatched = !this.view.readyLatched;
    if (effect.intent) this.conn.sendIntent(effect.intent.type, effect.intent.payload);
  }

  private cellFromPointer(event: MouseEvent): Cell | null {
    const info = this.view.levelInfo;
    if (!info) return null;
    const rect = this.canvas.getBoundingClientRect();
    const x = Math.floor((event.clientX - rect.left - MARGIN) / TILE);
    const y = Math.floor((event.clientY - rect.top - MARGIN) / TILE);
    if (x < 0 || y < 0 || x >= info.map.width || y >= info.map.height) return null;
    return [x, y];
  }

  private frame(): void {
    const now = performance.now();
    this.paint(buildDrawList(this.view, now));
    this.bindHud(buildHudModel(this.view, this.conn.status));
    requestAnimationFrame(() => this.frame());
  }

  private paint(cmds: DrawCmd[]): void {
    const info = this.view.levelInfo;
    const ctx = this.ctx;
    if (info) {
      this.canvas.width = info.map.width * TILE + MARGIN * 2;
      this.canvas.height = info.map.height * TILE + MARGIN * 2;
    }
    ctx.fillStyle = '#10151a';
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    const px = (v: number) => MARGIN + v * TILE;

    for (const cmd of cmds) {
      switch (cmd.kind) {
        case 'tile':
          ctx.fillStyle = TILE_COLORS[cmd.tile];
          ctx.fillRect(px(cmd.x) + 1, px(cmd.y) + 1, TILE - 2, TILE - 2);
          break;
        case 'grid-label':
          ctx.fillStyle = '#90a4ae';
          ctx.font = '10px monospace';
          ctx.textAlign = 'center';
          ctx.fillText(cmd.text, px(cmd.x) + TILE / 2, px(cmd.y) + TILE / 2 + 3);
          break;
        case 'trap':
          ctx.fillStyle = '#b71c1c';
          ctx.beginPath();
          ctx.arc(px(cmd.x) + TILE / 2, px(cmd.y) + TILE / 2, TILE / 5, 0, Math.PI * 2);
          ctx.fill();
          break;
        case 'tower': {
          const cx = px(cmd.x) + TILE / 2;
          const cy = px(cmd.y) + TILE / 2;
          ctx.fillStyle = '#cfd8dc';
          ctx.fillRect(cx - TILE / 3, cy - TILE / 3, (TILE * 2) / 3, (TILE * 2) / 3);
          ctx.strokeStyle = cmd.color; // owner outline
          ctx.lineWidth = cmd.selected ? 3 : 2;
          ctx.strokeRect(cx - TILE / 3, cy - TILE / 3, (TILE * 2) / 3, (TILE * 2) / 3);
          ctx.fillStyle = '#263238';
          ctx.font = '9px monospace';
          ctx.textAlign = 'center';
          ctx.fillText(cmd.spec.slice(0, 4), cx, cy + 3);
          break;
        }
        case 'range-circle':
          ctx.strokeStyle = 'rgba(255,255,255,0.5)';
          ctx.lineWidth = 1;
          ctx.beginPath();
          ctx.arc(px(cmd.x) + TILE / 2, px(cmd.y) + TILE / 2, cmd.radius * TILE, 0, Math.PI * 2);
          ctx.stroke();
          break;
        case 'sparkle': {
          const cx = px(this.view.towers.get(cmd.towerId)?.cell[0] ?? 0) + TILE / 2;
          const cy = px(this.view.towers.get(cmd.towerId)?.cell[1] ?? 0) + TILE / 2;
          ctx.fillStyle = '#fff176';
          ctx.beginPath();
          ctx.arc(
            cx + Math.cos(cmd.angle) * TILE * 0.55,
            cy + Math.sin(cmd.angle) * TILE * 0.55,
            2.5,
            0,
            Math.PI * 2,
          );
          ctx.fill();
          break;
        }
        case 'enemy': {
          const cx = px(cmd.x) + TILE / 2;
          const cy = px(cmd.y) + TILE / 2;
          ctx.fillStyle = cmd.effects.includes('FEAR')
            ? '#ce93d8'
            : cmd.effects.includes('SLOW')
              ? '#81d4fa'
              : '#ef5350';
          ctx.beginPath();
          ctx.arc(cx, cy, TILE / 3.2, 0, Math.PI * 2);
          ctx.fill();
          ctx.fillStyle = '#1b5e20';
          ctx.fillRect(cx - TILE / 3, cy - TILE / 2, (TILE * 2) / 3 * cmd.healthFrac, 3);
          break;
        }
        case 'hover':
          ctx.strokeStyle = cmd.ok ? '#ffffff' : '#ff5252';
          ctx.lineWidth = 2;
          ctx.strokeRect(px(cmd.x) + 1, px(cmd.y) + 1, TILE - 2, TILE - 2);
          break;
      }
    }
  }

  private bindHud(model: HudModel): void {
    this.hudRoot.replaceChildren();
    const top = el('div', 'hud-row');
    top.appendChild(el('span', 'hud-team', model.teamName));
    top.appendChild(
      el(
        'span',
        'hud-timer',
        model.countdownSeconds !== null ? `planning ${model.countdownSeconds}s` : model.phase,
      ),
    );
    top.appendChild(el('span', 'hud-money', `gold ${model.money}`));
    top.appendChild(el('span', 'hud-health', `health ${model.health}`));
    if (model.score !== null) top.appendChild(el('span', 'hud-score', `score ${Math.round(model.score)}`));
    top.appendChild(el('span', 'hud-conn', model.connection));
    this.hudRoot.appendChild(top);

    const buttons = el('div', 'hud-row build-buttons');
    for (const button of model.buildButtons) {
      const node = el('button', button.armed ? 'armed' : '', `${button.hotkey}:${button.label} (${button.cost})`);
      node.disabled = !button.enabled;
      node.onclick = () => this.dispatch({ kind: 'build-button', specId: button.specId });
      buttons.appendChild(node);
    }
    if (model.readyVisible) {
      const ready = el('button', model.readyLatched ? 'armed' : '', model.readyLatched ? 'ready ✓' : 'ready');
      ready.onclick = () => this.dispatch({ kind: 'ready-click' });
      buttons.appendChild(ready);
    }
    this.hudRoot.appendChild(buttons);

    for (const preview of model.spawnPreviews) {
      this.hudRoot.appendChild(
        el('div', 'hud-row preview', `${preview.id}: ${preview.variants.join(' → ')}`),
      );
    }

    if (model.upgradeMenu) {
      const menu = el('div', 'hud-row upgrade-menu');
      for (const row of model.upgradeMenu.rows) {
        const label =
          row.cost === null
            ? `${row.track} L${row.level} max`
            : `${row.track} L${row.level} → ${row.cost}`;
        const node = el('button', '', label);
        node.disabled = !row.enabled;
        node.onclick = () =>
          this.dispatch({ kind: 'upgrade-click', towerId: model.upgradeMenu!.towerId, track: row.track });
        menu.appendChild(node);
      }
      const sell = el('button', 'sell', `sell +${model.upgradeMenu.sellRefund}`);
      sell.disabled = !model.upgradeMenu.sellEnabled;
      sell.onclick = () => this.dispatch({ kind: 'sell-click', towerId: model.upgradeMenu!.towerId });
      menu.appendChild(sell);
      this.hudRoot.appendChild(menu);
    }

    if (model.infoPanel) {
      const panel = el('div', 'hud-row info-panel');
      if (model.infoPanel.title) panel.appendChild(el('strong', '', model.infoPanel.title));
      for (const line of model.infoPanel.lines) panel.appendChild(el('div', '', line));
      this.hudRoot.appendChild(panel);
    }
    if (model.lastError) this.hudRoot.appendChild(el('div', 'hud-row error', model.lastError));
    if (model.roundBanner) this.hudRoot.appendChild(el('div', 'hud-row banner', model.roundBanner));

    while (this.renderedChatLines < this.view.chat.length) {
      const line = this.view.chat[this.renderedChatLines];
      const node = el('div', 'chat-line');
      const name = el('span', 'chat-name', line.name + ': ');
      name.style.color = line.color;
      node.appendChild(name);
      node.appendChild(el('span', '', line.text));
      this.chatLog.appendChild(node);
      this.chatLog.scrollTop = this.chatLog.scrollHeight;
      this.renderedChatLines += 1;
    }
    this.chatInput.style.display = model.chatVisible ? '' : 'none';
  }
}

window.addEventListener('DOMContentLoaded', () => {
  const room = query('room');
  const name = query('name', 'player');
  const role = query('role', 'PLAYER').toUpperCase() === 'OBSERVER' ? 'OBSERVER' : 'PLAYER';
  const token = query('token');
  if (!room) {
    document.body.textContent = 'missing ?room=KEY in the URL';
    return;
  }
  new ClientApp(room, name, role, token);
});
