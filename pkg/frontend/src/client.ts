import { ServerEvent } from "./types";

export type ClientCallbacks = {
  onEvent: (ev: ServerEvent) => void;
  onToast: (message: string) => void;
};

/** Thin wrapper over the chat service API; all state lives in the reducer. */
export class SessionClient {
  private ws: WebSocket | null = null;

  constructor(
    private base: string,
    private sessionId: string,
    private callbacks: ClientCallbacks,
  ) {}

  static async create(base: string, worldText: string, callbacks: ClientCallbacks): Promise<SessionClient> {
    const res = await fetch(`${base}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ world: worldText }),
    });
    if (!res.ok) {
      throw new Error(`session create failed: ${res.status}`);
    }
    const doc = await res.json();
    return new SessionClient(base, doc.id, callbacks);
  }

  connect(): void {
    const url = `${this.base.replace(/^http/, "ws")}/sessions/${this.sessionId}/events`;
    this.ws = new WebSocket(url);
    this.ws.onmessage = (msg) => {
      this.callbacks.onEvent(JSON.parse(msg.data) as ServerEvent);
    };
  }

  /** Ask the server to replay the stream from a sequence number. */
  resync(since: number): void {
    this.ws?.send(JSON.stringify({ since }));
  }

  async sendUtterance(text: string): Promise<void> {
    if (!text.trim()) {
      return; // empty input stays disabled
    }
    const res = await fetch(`${this.base}/sessions/${this.sessionId}/utterances`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (res.status === 409) {
      this.callbacks.onToast("still processing the previous utterance");
    } else if (res.status === 422) {
      this.callbacks.onToast("the service rejected that utterance");
    } else if (!res.ok) {
      this.callbacks.onToast(`request failed: ${res.status}`);
    }
  }

  async sendReply(reply: "yes" | "no"): Promise<void> {
    await this.sendUtterance(reply);
  }
}
