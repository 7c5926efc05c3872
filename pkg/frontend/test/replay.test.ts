import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { renderView } from "../src/render";
import {
  applyEvent,
  initialView,
  quickRepliesVisible,
  renderEventStream,
  withPendingEcho,
} from "../src/state";
import { ServerEvent } from "../src/types";

const here = dirname(fileURLToPath(import.meta.url));

function loadEvents(): ServerEvent[] {
  const text = readFileSync(join(here, "fixtures", "exp2_events.jsonl"), "utf-8");
  return text
    .split("\n")
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line) as ServerEvent);
}

describe("experiment-2 recorded stream", () => {
  const events = loadEvents();

  it("renders exactly six transcript entries", () => {
    const view = renderEventStream(events);
    expect(view.schemaError).toBeNull();
    expect(view.transcript).toHaveLength(6);
    expect(view.transcript.map((t) => t.speaker)).toEqual([
      "human", "human", "robot", "human", "robot", "human",
    ]);
    expect(view.transcript[2].text).toBe(
      "is the kibo capsule connected to the columbus capsule?",
    );
    expect(view.transcript[4].text).toBe(
      "is the harmony capsule connected to the columbus capsule?",
    );
  });

  it("shows yes/no buttons exactly during the two awaiting-answer intervals", () => {
    let view = initialView;
    const visibleAfterSeq: number[] = [];
    for (const ev of events) {
      view = applyEvent(view, ev);
      if (quickRepliesVisible(view)) {
        visibleAfterSeq.push(ev.seq);
      }
    }
    // interval one: after the first query's phase event until the human answers;
    // interval two: after the second query's phase event until the human answers
    expect(visibleAfterSeq).toEqual([7, 10]);
    const intervals = visibleAfterSeq.reduce<number[][]>((acc, seq) => {
      const last = acc[acc.length - 1];
      if (last && seq === last[last.length - 1] + 1) {
        last.push(seq);
      } else {
        acc.push([seq]);
      }
      return acc;
    }, []);
    expect(intervals).toHaveLength(2);
  });

  it("moves the robot marker through kibo, harmony, columbus", () => {
    let view = initialView;
    const path: string[] = [];
    for (const ev of events) {
      view = applyEvent(view, ev);
      const at = view.world.robot;
      if (at && path[path.length - 1] !== at) {
        path.push(at);
      }
    }
    expect(path).toEqual(["kibo", "harmony", "columbus"]);
    const markup = renderView(view);
    expect(markup).toContain('data-at="columbus"');
  });

  it("ends idle with the final controller view populated", () => {
    const view = renderEventStream(events);
    expect(view.phase).toBe("idle");
    expect(view.controller).not.toBeNull();
    expect(view.controller!.nodes).toHaveLength(9);
    expect(view.statusLog).toContain("arrived at the columbus capsule");
  });
});

describe("reducer properties", () => {
  const events = loadEvents();

  it("is a pure function of the stream", () => {
    expect(renderEventStream(events)).toEqual(renderEventStream(events));
    expect(renderView(renderEventStream(events))).toBe(
      renderView(renderEventStream(events)),
    );
  });

  it("empty stream renders an empty transcript", () => {
    const view = renderEventStream([]);
    expect(view.transcript).toEqual([]);
    expect(view.world.nodes).toEqual([]);
    expect(quickRepliesVisible(view)).toBe(false);
  });

  it("flags a sequence gap for resync", () => {
    const view = renderEventStream([events[0], events[2]]);
    expect(view.needsResync).toBe(true);
  });

  it("raises the schema banner on a version mismatch", () => {
    const view = renderEventStream([{ ...events[0], v: 99 }]);
    expect(view.schemaError).toMatch(/version/);
    expect(renderView(view)).toContain("schema mismatch");
  });

  it("reconciles the optimistic echo against the turn event", () => {
    let view = withPendingEcho(renderEventStream(events.slice(0, 2)), "go to the columbus capsule");
    expect(view.pendingEchoes).toHaveLength(1);
    for (const ev of events.slice(2)) {
      view = applyEvent(view, ev);
    }
    expect(view.pendingEchoes).toHaveLength(0);
  });
});
