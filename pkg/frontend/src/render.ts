import { circularLayout } from "./layout";
import { quickRepliesVisible } from "./state";
import { UiSessionView } from "./types";

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function worldSvg(view: UiSessionView): string {
  const pos = circularLayout(view.world.nodes, 150, 130, 95);
  const parts: string[] = [`<svg class="world-graph" viewBox="0 0 300 260">`];
  for (const [a, b] of view.world.edges) {
    const pa = pos.get(a);
    const pb = pos.get(b);
    if (pa && pb) {
      parts.push(
        `<line x1="${pa.x.toFixed(1)}" y1="${pa.y.toFixed(1)}" x2="${pb.x.toFixed(1)}" y2="${pb.y.toFixed(1)}" class="link"/>`,
      );
    }
  }
  for (const name of [...view.world.nodes].sort()) {
    const p = pos.get(name)!;
    const here = view.world.robot === name;
    parts.push(
      `<circle data-region="${name}" cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="16" class="region${here ? " robot" : ""}"/>`,
      `<text x="${p.x.toFixed(1)}" y="${(p.y + 30).toFixed(1)}" text-anchor="middle">${name}</text>`,
    );
  }
  if (view.world.robot) {
    const p = pos.get(view.world.robot);
    if (p) {
      parts.push(`<circle class="robot-marker" data-at="${view.world.robot}" cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="7"/>`);
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

function controllerSvg(view: UiSessionView): string {
  if (!view.controller) {
    return `<p class="controller-empty">no controller synthesized yet</p>`;
  }
  const names = view.controller.nodes.map((n) => `${n.id}`);
  const pos = circularLayout(names, 170, 150, 120);
  const label = (id: number) => {
    const node = view.controller!.nodes.find((n) => n.id === id)!;
    return `(${node.state.join(", ")})`;
  };
  const parts: string[] = [`<svg class="controller-graph" viewBox="0 0 340 300">`];
  for (const e of view.controller.edges) {
    const pa = pos.get(`${e.from}`)!;
    const pb = pos.get(`${e.to}`)!;
    parts.push(
      `<line x1="${pa.x.toFixed(1)}" y1="${pa.y.toFixed(1)}" x2="${pb.x.toFixed(1)}" y2="${pb.y.toFixed(1)}" class="edge"/>`,
    );
  }
  for (const node of view.controller.nodes) {
    const p = pos.get(`${node.id}`)!;
    const active = view.controller.active === node.id;
    parts.push(
      `<circle data-node="${node.id}" cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="10" class="ctrl${active ? " active" : ""}"/>`,
      `<title>${escapeHtml(label(node.id))}</title>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

/** Render the whole console as markup; the browser shell swaps it in. */
export function renderView(view: UiSessionView): string {
  if (view.schemaError) {
    return `<div class="banner error">schema mismatch: ${escapeHtml(view.schemaError)}</div>`;
  }
  const resync = view.needsResync ? `<div class="banner">stream gap, resyncing…</div>` : "";
  const bubbles = view.transcript
    .map(
      (t) =>
        `<div class="bubble ${t.speaker}" data-seq="${t.seq}">${escapeHtml(t.text)}</div>`,
    )
    .join("");
  const echoes = view.pendingEchoes
    .map((t) => `<div class="bubble human pending">${escapeHtml(t)}</div>`)
    .join("");
  const status = view.statusLog
    .map((t) => `<div class="status-line">${escapeHtml(t)}</div>`)
    .join("");
  const quick = quickRepliesVisible(view)
    ? `<div class="quick-replies"><button data-reply="yes">yes</button><button data-reply="no">no</button></div>`
    : "";
  return [
    resync,
    `<div class="phase-badge phase-${view.phase}">${view.phase}</div>`,
    `<div class="transcript">${bubbles}${echoes}</div>`,
    quick,
    `<div class="status-log">${status}</div>`,
    `<div class="panes">${worldSvg(view)}${controllerSvg(view)}</div>`,
  ].join("\n");
}
