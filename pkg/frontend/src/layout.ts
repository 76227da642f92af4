/** Deterministic layered graph layout.
 *
 * Vertical level = topological rank (longest path from the sources),
 * horizontal order within a level = permId sort. The result is a pure
 * function of the graph value, so the same graph always renders with
 * identical positions regardless of where it was opened or how the server
 * happened to order the arrays.
 */

import type { GraphJson } from "./types.js";

export interface NodePosition {
  x: number;
  y: number;
  rank: number;
}

export interface LayoutOptions {
  columnWidth: number;
  rowHeight: number;
  marginX: number;
  marginY: number;
}

export interface LayoutResult {
  positions: Map<string, NodePosition>;
  rows: string[][];
  width: number;
  height: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  columnWidth: 170,
  rowHeight: 90,
  marginX: 20,
  marginY: 20,
};

export function layeredLayout(
  graph: GraphJson,
  options: LayoutOptions = DEFAULT_LAYOUT,
): LayoutResult {
  const ids = [...graph.nodes.map((n) => n.id)].sort();
  const idSet = new Set(ids);
  const children = new Map<string, string[]>();
  const inDegree = new Map<string, number>();
  for (const id of ids) {
    children.set(id, []);
    inDegree.set(id, 0);
  }
  const edges = [...graph.edges]
    .filter((e) => idSet.has(e.from) && idSet.has(e.to))
    .sort((a, b) => (a.from + a.to < b.from + b.to ? -1 : 1));
  for (const edge of edges) {
    children.get(edge.from)!.push(edge.to);
    inDegree.set(edge.to, inDegree.get(edge.to)! + 1);
  }

  // longest-path ranks via Kahn's algorithm (graph is acyclic by contract)
  const rank = new Map<string, number>();
  const remaining = new Map(inDegree);
  const queue = ids.filter((id) => remaining.get(id) === 0).sort();
  for (const id of queue) rank.set(id, 0);
  while (queue.length > 0) {
    const node = queue.shift()!;
    for (const child of children.get(node)!) {
      rank.set(child, Math.max(rank.get(child) ?? 0, rank.get(node)! + 1));
      remaining.set(child, remaining.get(child)! - 1);
      if (remaining.get(child) === 0) queue.push(child);
    }
    queue.sort();
  }

  const maxRank = Math.max(0, ...rank.values());
  const rows: string[][] = Array.from({ length: maxRank + 1 }, () => []);
  for (const id of ids) {
    rows[rank.get(id) ?? 0].push(id); // ids are pre-sorted, rows stay sorted
  }

  const widest = Math.max(1, ...rows.map((row) => row.length));
  const width = widest * options.columnWidth + 2 * options.marginX;
  const positions = new Map<string, NodePosition>();
  rows.forEach((row, level) => {
    const rowWidth = row.length * options.columnWidth;
    const offset = options.marginX + (width - 2 * options.marginX - rowWidth) / 2;
    row.forEach((id, index) => {
      positions.set(id, {
        x: offset + (index + 0.5) * options.columnWidth,
        y: options.marginY + (level + 0.5) * options.rowHeight,
        rank: level,
      });
    });
  });

  return {
    positions,
    rows,
    width,
    height: (maxRank + 1) * options.rowHeight + 2 * options.marginY,
  };
}
