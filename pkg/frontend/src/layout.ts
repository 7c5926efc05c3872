/** Deterministic circular layout: stable positions for screenshot tests. */

export type Point = { x: number; y: number };

export function circularLayout(names: string[], cx: number, cy: number, radius: number): Map<string, Point> {
  const ordered = [...names].sort();
  const out = new Map<string, Point>();
  ordered.forEach((name, i) => {
    const angle = (2 * Math.PI * i) / Math.max(ordered.length, 1) - Math.PI / 2;
    out.set(name, {
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    });
  });
  return out;
}
