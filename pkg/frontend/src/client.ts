/** Gateway socket wrapper: a single event-driven connection with resume. */

import type { Envelope } from "./protocol.js";
import { canonicalJson, parseFrame } from "./protocol.js";

export interface GatewayClientOptions {
  url: string;
  preset?: string;
  onFrame: (frame: Envelope) => void;
  onStatus: (status: "connecting" | "connected" | "disconnected") => void;
  reconnectDelayMs?: number;
}

export class GatewayClient {
  private socket: WebSocket | null = null;
  private closed = false;

  constructor(private readonly opts: GatewayClientOptions) {}

  connect(): void {
    this.closed = false;
    const preset = this.opts.preset ? `?preset=${encodeURIComponent(this.opts.preset)}` : "";
    this.opts.onStatus("connecting");
    const socket = new WebSocket(`${this.opts.url}/session${preset}`);
    this.socket = socket;
    socket.onopen = () => this.opts.onStatus("connected");
    socket.onmessage = (event: MessageEvent) => {
      try {
        this.opts.onFrame(parseFrame(String(event.data)));
      } catch (err) {
        console.error("bad frame", err);
      }
    };
    socket.onclose = () => {
      this.opts.onStatus("disconnected");
      if (!this.closed) {
        setTimeout(() => this.connect(), this.opts.reconnectDelayMs ?? 1000);
      }
    };
    socket.onerror = () => socket.close();
  }

  /** Returns false when disconnected (callers show the error banner). */
  send(message: Envelope): boolean {
    if (!this.socket || this.socket.readyState !== WebSocket.OPEN) {
      return false;
    }
    this.socket.send(canonicalJson(message));
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
