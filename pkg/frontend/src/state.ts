import {
  ControllerGraph,
  Phase,
  SCHEMA_VERSION,
  ServerEvent,
  UiSessionView,
} from "./types";

export const initialView: UiSessionView = {
  transcript: [],
  statusLog: [],
  world: { nodes: [], edges: [], robot: null },
  controller: null,
  phase: "idle",
  answerInFlight: false,
  pendingEchoes: [],
  lastSeq: -1,
  needsResync: false,
  schemaError: null,
};

/** Yes/no quick replies show only while an answer is actually awaited. */
export function quickRepliesVisible(view: UiSessionView): boolean {
  return view.phase === "awaiting_answer" && !view.answerInFlight;
}

function controllerFromPayload(payload: any): ControllerGraph {
  return {
    nodes: payload.nodes.map((n: any) => ({
      id: n.id,
      state: [...n.state],
      memory: n.memory,
    })),
    edges: payload.edges.map((e: any) => ({ from: e.from, to: e.to })),
    initial: [...payload.initial],
    active: payload.initial.length === 1 ? payload.initial[0] : null,
  };
}

function activeNode(controller: ControllerGraph, location: string, commanded: string): number | null {
  const want = new Set([`in_${location}`, `go_${commanded}`]);
  for (const node of controller.nodes) {
    if (node.state.length === want.size && node.state.every((a) => want.has(a))) {
      return node.id;
    }
  }
  return null;
}

/** Pure fold step: the rendered view is a function of the ordered events. */
export function applyEvent(view: UiSessionView, ev: ServerEvent): UiSessionView {
  if (view.schemaError) {
    return view;
  }
  if (ev.v !== undefined && ev.v !== SCHEMA_VERSION) {
    return { ...view, schemaError: `unsupported event schema version ${ev.v}` };
  }
  if (typeof ev.seq !== "number" || typeof ev.type !== "string" || typeof ev.payload !== "object") {
    return { ...view, schemaError: "malformed event" };
  }
  if (ev.seq !== view.lastSeq + 1) {
    return { ...view, needsResync: true };
  }
  const next: UiSessionView = { ...view, lastSeq: ev.seq };
  switch (ev.type) {
    case "world": {
      next.world = {
        nodes: ev.payload.regions.map((r: any) => r.id),
        edges: ev.payload.connectivity.map((pair: any) => [pair[0], pair[1]]),
        robot: ev.payload.robot_at ?? null,
      };
      return next;
    }
    case "phase": {
      next.phase = ev.payload.phase as Phase;
      next.answerInFlight = false;
      return next;
    }
    case "turn": {
      const entry = { speaker: ev.payload.speaker, text: ev.payload.text, seq: ev.seq };
      next.transcript = [...view.transcript, entry];
      if (ev.payload.speaker === "human") {
        next.answerInFlight = true;
        next.pendingEchoes = view.pendingEchoes.filter((t) => t !== ev.payload.text);
      }
      return next;
    }
    case "status": {
      next.statusLog = [...view.statusLog, ev.payload.text];
      return next;
    }
    case "controller": {
      next.controller = controllerFromPayload(ev.payload);
      return next;
    }
    case "tick": {
      next.world = { ...view.world, robot: ev.payload.location };
      if (view.controller) {
        next.controller = {
          ...view.controller,
          active: activeNode(view.controller, ev.payload.location, ev.payload.commanded),
        };
      }
      return next;
    }
    default:
      return { ...next, schemaError: `unknown event type ${ev.type}` };
  }
}

/** Replay a whole recorded stream into a view. */
export function renderEventStream(events: ServerEvent[]): UiSessionView {
  return events.reduce(applyEvent, initialView);
}

/** Local echo of a just-submitted utterance, reconciled by the turn event. */
export function withPendingEcho(view: UiSessionView, text: string): UiSessionView {
  return { ...view, pendingEchoes: [...view.pendingEchoes, text] };
}
