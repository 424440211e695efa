/** Deterministic force-directed layout and the node radius scale.
 * No rendering here; callers get plain coordinates. */

export interface Point {
  x: number;
  y: number;
}

/** Radius monotone in node size: sqrt-compressed between rMin and rMax. */
export function radiusScale(
  sizes: number[],
  rMin = 7,
  rMax = 28,
): (size: number) => number {
  const biggest = Math.max(0, ...sizes);
  if (biggest <= 0) {
    return () => rMin;
  }
  const span = Math.sqrt(biggest);
  return (size: number) => rMin + (rMax - rMin) * (Math.sqrt(Math.max(0, size)) / span);
}

function hashString(text: string): number {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return (h >>> 0) / 4294967296;
}

/** Spring/repulsion iterations from a seeded ring start, so the same
 * graph always lays out the same way. */
export function forceLayout(
  nodeIds: string[],
  edges: [string, string][],
  width = 640,
  height = 480,
  iterations = 120,
): Map<string, Point> {
  const positions = new Map<string, Point>();
  const n = nodeIds.length;
  if (n === 0) return positions;
  const cx = width / 2;
  const cy = height / 2;
  const ring = Math.min(width, height) / 2 - 40;
  nodeIds.forEach((id, i) => {
    const jitter = hashString(id) * 0.5;
    const angle = (2 * Math.PI * i) / n + jitter;
    positions.set(id, {
      x: cx + ring * Math.cos(angle) * (0.6 + 0.4 * hashString(id + "#r")),
      y: cy + ring * Math.sin(angle) * (0.6 + 0.4 * hashString(id + "#s")),
    });
  });
  const idealEdge = Math.max(60, ring / Math.sqrt(n));
  const repulsion = idealEdge * idealEdge;
  for (let step = 0; step < iterations; step++) {
    const cooling = 1 - step / iterations;
    const force = new Map<string, Point>(nodeIds.map((id) => [id, { x: 0, y: 0 }]));
    for (let i = 0; i < n; i++) {
      const a = nodeIds[i]!;
      const pa = positions.get(a)!;
      for (let j = i + 1; j < n; j++) {
        const b = nodeIds[j]!;
        const pb = positions.get(b)!;
        const dx = pa.x - pb.x;
        const dy = pa.y - pb.y;
        const dist2 = Math.max(dx * dx + dy * dy, 1);
        const push = repulsion / dist2;
        const fa = force.get(a)!;
        const fb = force.get(b)!;
        fa.x += dx * push * 0.01;
        fa.y += dy * push * 0.01;
        fb.x -= dx * push * 0.01;
        fb.y -= dy * push * 0.01;
      }
    }
    for (const [u, v] of edges) {
      const pu = positions.get(u);
      const pv = positions.get(v);
      if (!pu || !pv) continue;
      const dx = pv.x - pu.x;
      const dy = pv.y - pu.y;
      const dist = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = ((dist - idealEdge) / dist) * 0.05;
      const fu = force.get(u)!;
      const fv = force.get(v)!;
      fu.x += dx * pull;
      fu.y += dy * pull;
      fv.x -= dx * pull;
      fv.y -= dy * pull;
    }
    for (const id of nodeIds) {
      const p = positions.get(id)!;
      const f = force.get(id)!;
      p.x = Math.min(width - 20, Math.max(20, p.x + f.x * cooling));
      p.y = Math.min(height - 20, Math.max(20, p.y + f.y * cooling));
    }
  }
  return positions;
}
