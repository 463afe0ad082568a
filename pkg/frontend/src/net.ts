// Connection layer: sends intents, re-orders inbound messages by sequence
// number, and keeps a capture of everything sent for the zero-authority
// audit. The socket is injectable so tests can drive a node `ws` client or
// a fake; in the browser it is the native WebSocket.

import { IntentType, WireMessage, decodeMessage, encodeMessage } from './protocol.js';

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((event: { data: string }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: ((err: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type MessageHandler = (message: WireMessage) => void;

export class GameConnection {
  readonly sent: WireMessage[] = [];
  status: 'connecting' | 'open' | 'closed' = 'connecting';
  player: string | null = null; // slot id, echoed into intent payloads

  private socket: SocketLike;
  private outSeq = 0;
  private expectedSeq = 1;
  private held = new Map<number, WireMessage>();
  private handlers: MessageHandler[] = [];
  private statusHandlers: (() => void)[] = [];

  constructor(
    private readonly room: string,
    url: string,
    factory: SocketFactory,
  ) {
    this.socket = factory(url);
    this.socket.onopen = () => {
      this.status = 'open';
      this.statusHandlers.forEach((fn) => fn());
    };
    this.socket.onclose = () => {
      this.status = 'closed';
      this.statusHandlers.forEach((fn) => fn());
    };
    this.socket.onerror = () => {
      this.status = 'closed';
      this.statusHandlers.forEach((fn) => fn());
    };
    this.socket.onmessage = (event) => this.receive(event.data);
  }

  onMessage(handler: MessageHandler): void {
    this.handlers.push(handler);
  }

  onStatusChange(handler: () => void): void {
    this.statusHandlers.push(handler);
  }

  whenOpen(): Promise<void> {
    if (this.status === 'open') return Promise.resolve();
    return new Promise((resolve, reject) => {
      this.onStatusChange(() => {
        if (this.status === 'open') resolve();
        else reject(new Error('socket closed before opening'));
      });
    });
  }

  sendIntent(type: IntentType, payload: Record<string, unknown> = {}): number {
    this.outSeq += 1;
    const body =
      this.player !== null && payload['player'] === undefined
        ? { player: this.player, ...payload }
        : payload;
    const message: WireMessage = { seq: this.outSeq, type, room: this.room, payload: body };
    this.sent.push(message);
    this.socket.send(encodeMessage(message));
    return message.seq;
  }

  join(name: string, role: 'PLAYER' | 'OBSERVER' = 'PLAYER', token?: string): number {
    const payload = token ? { token } : { name, role };
    return this.sendIntent('JOIN', payload);
  }

  close(): void {
    this.socket.close();
  }

  // Messages may arrive out of order across transports that re-frame; the
  // server guarantees gapless per-recipient sequence numbers, so anything
  // early is held until the gap fills.
  private receive(raw: string): void {
    let message: WireMessage;
    try {
      message = decodeMessage(raw);
    } catch {
      return; // non-protocol frame: ignored
    }
    if (message.seq < this.expectedSeq) return; // duplicate
    this.held.set(message.seq, message);
    while (this.held.has(this.expectedSeq)) {
      const next = this.held.get(this.expectedSeq)!;
      this.held.delete(this.expectedSeq);
      this.expectedSeq += 1;
      this.handlers.forEach((fn) => fn(next));
    }
  }
}

export function browserSocketFactory(url: string): SocketLike {
  const ws = new WebSocket(url);
  const wrapper: SocketLike = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onmessage: null,
    onopen: null,
    onclose: null,
    onerror: null,
  };
  ws.onmessage = (event) => wrapper.onmessage?.({ data: String(event.data) });
  ws.onopen = () => wrapper.onopen?.();
  ws.onclose = () => wrapper.onclose?.();
  ws.onerror = (err) => wrapper.onerror?.(err);
  return wrapper;
}
