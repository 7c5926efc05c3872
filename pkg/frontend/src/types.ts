export const SCHEMA_VERSION = 1;

export type ServerEvent = {
  seq: number;
  type: "world" | "phase" | "turn" | "status" | "controller" | "tick" | string;
  payload: any;
  v?: number;
};

export type Phase = "idle" | "awaiting_answer" | "executing";

export type TranscriptEntry = {
  speaker: "human" | "robot";
  text: string;
  seq: number;
};

export type WorldGraph = {
  nodes: string[];
  edges: [string, string][];
  robot: string | null;
};

export type ControllerNode = {
  id: number;
  state: string[];
  memory: number;
};

export type ControllerGraph = {
  nodes: ControllerNode[];
  edges: { from: number; to: number }[];
  initial: number[];
  active: number | null;
};

export type UiSessionView = {
  transcript: TranscriptEntry[];
  statusLog: string[];
  world: WorldGraph;
  controller: ControllerGraph | null;
  phase: Phase;
  answerInFlight: boolean;
  pendingEchoes: string[];
  lastSeq: number;
  needsResync: boolean;
  schemaError: string | null;
};
