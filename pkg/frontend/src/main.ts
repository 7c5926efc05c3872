import { SessionClient } from "./client";
import { renderView } from "./render";
import { applyEvent, initialView, withPendingEcho } from "./state";
import { ServerEvent, UiSessionView } from "./types";

const DEFAULT_WORLD = `region kibo "the Kibo capsule"
region harmony "the Harmony capsule"
region columbus "the Columbus capsule"
robot columbus
`;

async function boot() {
  const root = document.getElementById("app")!;
  const input = document.getElementById("utterance") as HTMLInputElement;
  const send = document.getElementById("send") as HTMLButtonElement;
  const toast = document.getElementById("toast")!;

  let view: UiSessionView = initialView;

  const redraw = () => {
    root.innerHTML = renderView(view);
    send.disabled = input.value.trim() === "";
    for (const btn of root.querySelectorAll<HTMLButtonElement>("[data-reply]")) {
      btn.onclick = () => client.sendReply(btn.dataset.reply as "yes" | "no");
    }
  };

  const client = await SessionClient.create(window.location.origin, DEFAULT_WORLD, {
    onEvent: (ev: ServerEvent) => {
      view = applyEvent(view, ev);
      if (view.needsResync) {
        view = { ...view, needsResync: false };
        client.resync(view.lastSeq + 1);
      }
      redraw();
    },
    onToast: (message) => {
      toast.textContent = message;
      setTimeout(() => (toast.textContent = ""), 2500);
    },
  });
  client.connect();

  input.oninput = () => {
    send.disabled = input.value.trim() === "";
  };
  send.onclick = async () => {
    const text = input.value.trim();
    if (!text) {
      return;
    }
    view = withPendingEcho(view, text);
    redraw();
    input.value = "";
    await client.sendUtterance(text);
  };
  redraw();
}

boot();
