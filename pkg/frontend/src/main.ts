/** Operator console: scene canvas, word strip, and live pipeline panes. */

import { GatewayClient } from "./client.js";
import { sceneRequest, wordMessage } from "./protocol.js";
import {
  applyFrame,
  highlightedObjectId,
  initialState,
  markConnection,
  recordSentWord,
  type ConsoleState,
} from "./state.js";
import { clickToRay, DEFAULT_VIEW, dragLengthPx, pointerToRay, worldToScreen, type Drag } from "./view.js";

const CLASS_COLORS: Record<string, string> = {
  cup: "#d9534f",
  bowl: "#5bc0de",
  plate: "#999999",
  bottle: "#5cb85c",
  rubbish: "#8a6d3b",
};

const QUICK_WORDS = [
  "pick", "put", "pour", "push", "throw", "clean", "home",
  "cup", "bowl", "plate",
  "this", "that", "there", "near", "ninety", "degrees", "finish",
];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

class ConsoleApp {
  state: ConsoleState = initialState();
  view = DEFAULT_VIEW;
  touchMode = false;
  drag: Drag | null = null;
  t0 = performance.now();
  client: GatewayClient;
  canvas = el<HTMLCanvasElement>("scene");
  wordBox = el<HTMLInputElement>("word-input");

  constructor() {
    const url = `ws://${location.hostname}:8787`;
    this.client = new GatewayClient({
      url,
      preset: new URLSearchParams(location.search).get("preset") ?? undefined,
      onFrame: (frame) => {
        this.state = applyFrame(this.state, frame);
        this.render();
      },
      onStatus: (status) => {
        this.state = markConnection(this.state, status);
        if (status === "connected") this.client.send(sceneRequest(this.now()));
        this.render();
      },
    });
    this.bindInputs();
    this.client.connect();
    this.render();
  }

  now(): number {
    return (performance.now() - this.t0) / 1000;
  }

  bindInputs() {
    this.canvas.addEventListener("pointerdown", (ev) => {
      this.drag = { startPx: this.canvasPx(ev), endPx: this.canvasPx(ev) };
    });
    this.canvas.addEventListener("pointermove", (ev) => {
      if (!this.drag) return;
      this.drag.endPx = this.canvasPx(ev);
      const msg = pointerToRay(this.drag, this.view, this.now());
      if (msg) this.send(msg);
      this.render();
    });
    this.canvas.addEventListener("pointerup", (ev) => {
      if (!this.drag) return;
      this.drag.endPx = this.canvasPx(ev);
      if (this.touchMode && dragLengthPx(this.drag) < 8) {
        this.send(clickToRay(this.drag.endPx.x, this.drag.endPx.y, this.view, this.now()));
      } else {
        const msg = pointerToRay(this.drag, this.view, this.now());
        if (msg) this.send(msg);
      }
      this.drag = null;
      this.render();
    });
    el<HTMLButtonElement>("send-word").addEventListener("click", () => this.sendWord());
    this.wordBox.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") this.sendWord();
    });
    el<HTMLInputElement>("touch-mode").addEventListener("change", (ev) => {
      this.touchMode = (ev.target as HTMLInputElement).checked;
    });
    const strip = el<HTMLDivElement>("quick-words");
    for (const word of QUICK_WORDS) {
      const btn = document.createElement("button");
      btn.textContent = word;
      btn.addEventListener("click", () => this.sendWordText(word));
      strip.appendChild(btn);
    }
    this.setupSpeech();
  }

  setupSpeech() {
    // optional sugar: browser speech feeds the same word path
    const SpeechRecognition =
      (window as any).SpeechRecognition ?? (window as any).webkitSpeechRecognition;
    const toggle = el<HTMLInputElement>("speech-mode");
    if (!SpeechRecognition) {
      toggle.disabled = true;
      return;
    }
    let recognizer: any = null;
    toggle.addEventListener("change", () => {
      if (toggle.checked) {
        recognizer = new SpeechRecognition();
        recognizer.continuous = true;
        recognizer.interimResults = false;
        recognizer.onresult = (ev: any) => {
          const phrase: string = ev.results[ev.results.length - 1][0].transcript;
          for (const word of phrase.trim().toLowerCase().split(/\s+/)) {
            if (word) this.sendWordText(word);
          }
        };
        recognizer.start();
      } else {
        recognizer?.stop();
        recognizer = null;
      }
    });
  }

  canvasPx(ev: PointerEvent) {
    const rect = this.canvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  }

  send(msg: ReturnType<typeof sceneRequest>) {
    if (!this.client.send(msg)) {
      this.state = { ...this.state, errors: [...this.state.errors, "disconnected: message not sent"] };
      this.render();
    }
  }

  sendWord() {
    const text = this.wordBox.value.trim().toLowerCase();
    if (!text) return;
    this.wordBox.value = "";
    this.sendWordText(text);
  }

  sendWordText(text: string) {
    const t = this.now();
    if (this.client.send(wordMessage(text, t - 0.2, t))) {
      this.state = recordSentWord(this.state, text, t);
    } else {
      this.state = { ...this.state, errors: [...this.state.errors, "disconnected: word not sent"] };
    }
    this.render();
  }

  render() {
    this.renderScene();
    this.renderPanes();
  }

  renderScene() {
    const ctx = this.canvas.getContext("2d")!;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#f6f2e9";
    ctx.fillRect(0, 0, width, height);

    // table footprint
    const t0 = worldToScreen(this.view, -0.65, 0.65);
    const t1 = worldToScreen(this.view, 0.65, 0.0);
    ctx.fillStyle = "#e0d4b0";
    ctx.fillRect(t0.px, t0.py, t1.px - t0.px, t1.py - t0.py);
    ctx.strokeStyle = "#b8a888";
    ctx.strokeRect(t0.px, t0.py, t1.px - t0.px, t1.py - t0.py);

    const highlight = highlightedObjectId(this.state);
    for (const obj of this.state.objects) {
      const { px, py } = worldToScreen(this.view, obj.position[0], obj.position[1]);
      const half = (obj.width_m / 2) * this.view.scale;
      ctx.fillStyle = CLASS_COLORS[obj.class] ?? "#777";
      ctx.fillRect(px - half, py - half, 2 * half, 2 * half);
      if (obj.id === highlight) {
        ctx.lineWidth = 3;
        ctx.strokeStyle = obj.id === this.state.boundObjectId ? "#ff8800" : "#2255ff";
        ctx.strokeRect(px - half - 4, py - half - 4, 2 * half + 8, 2 * half + 8);
        ctx.lineWidth = 1;
      }
      ctx.fillStyle = "#222";
      ctx.font = "11px sans-serif";
      ctx.fillText(obj.id, px - half, py - half - 6);
    }

    if (this.state.robot) {
      const [x, y] = this.state.robot.pose;
      const { px, py } = worldToScreen(this.view, x!, y!);
      ctx.strokeStyle = "#222";
      ctx.beginPath();
      ctx.moveTo(px - 8, py);
      ctx.lineTo(px + 8, py);
      ctx.moveTo(px, py - 8);
      ctx.lineTo(px, py + 8);
      ctx.stroke();
    }

    if (this.drag) {
      ctx.strokeStyle = "#2255ff";
      ctx.setLineDash([6, 4]);
      ctx.beginPath();
      ctx.moveTo(this.drag.startPx.x, this.drag.startPx.y);
      ctx.lineTo(this.drag.endPx.x, this.drag.endPx.y);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }

  renderPanes() {
    el("status").textContent =
      `${this.state.connection}` + (this.state.sessionId ? ` (${this.state.sessionId})` : "");
    el("status").className = `status ${this.state.connection}`;
    el("phase").textContent = this.state.fusion?.phase ?? "-";
    el("tokens").innerHTML = this.state.tokens
      .map((tok) => `<span class="${tok.recognized ? "tok ok" : "tok"}">${tok.text}</span>`)
      .join(" ");
    el("hover").textContent = this.state.hover?.object_id
      ? `${this.state.hover.object_id} (${(this.state.hover.distance_m ?? 0).toFixed(3)} m` +
        `${this.state.hover.authoritative ? ", bound" : ""})`
      : "-";
    el("intention").textContent = this.state.intention
      ? JSON.stringify(this.state.intention.intention, null, 2)
      : "-";
    el("plan").textContent = this.state.plan
      ? `# ${this.state.plan.provenance}\n${this.state.plan.text}`
      : "-";
    el("verdicts").innerHTML = this.state.verdicts
      .map((v) =>
        v.ok
          ? `<div class="verdict ok">${v.stage}: ok</div>`
          : `<div class="verdict fail">${v.stage}: ${v.error}: ${v.message}</div>`,
      )
      .join("");
    el("trajectory").textContent = this.state.trajectory
      .map((f) => `${f.tick.toString().padStart(3)} ${f.primitive} ${f.events.join(" ")}`)
      .join("\n");
    el("errors").innerHTML = this.state.errors
      .map((e) => `<div class="banner">${e}</div>`)
      .join("");
  }
}

new ConsoleApp();
