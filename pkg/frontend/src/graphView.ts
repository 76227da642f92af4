/** Interactive provenance-graph explorer.
 *
 * Nodes are colored by kind with a legend, laid out with the deterministic
 * layered layout, and expose their key metadata in a hover tooltip taken
 * verbatim from the API. Clicking a node navigates to its record page.
 */

import type { ApiClient } from "./api.js";
import { layeredLayout } from "./layout.js";
import type { Direction, GraphJson } from "./types.js";

export const KIND_COLORS: Record<string, string> = {
  sample: "#8fd18f",
  protocol: "#f2e394",
  device: "#9ecbe8",
  entry: "#d7bde2",
  dataset: "#f5b041",
  other: "#d5d8dc",
};

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_WIDTH = 150;
const NODE_HEIGHT = 44;

export interface GraphViewState {
  graph: GraphJson | null;
  selected: string | null;
  hover: string | null;
  element: string;
  direction: Direction;
  depth: number | null;
  error: string | null;
}

export class GraphExplorer {
  readonly state: GraphViewState = {
    graph: null,
    selected: null,
    hover: null,
    element: "",
    direction: "both",
    depth: null,
    error: null,
  };

  private lastQuery: { root?: string; element?: string } | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly onOpenRecord: (permId: string) => void = () => {},
  ) {}

  async loadRoot(root: string): Promise<void> {
    this.lastQuery = { root };
    await this.fetch({ root, direction: this.state.direction, depth: this.state.depth });
  }

  async loadElement(symbol: string): Promise<void> {
    this.state.element = symbol;
    this.lastQuery = { element: symbol };
    await this.fetch({ element: symbol });
  }

  private async fetch(params: {
    root?: string;
    element?: string;
    direction?: Direction;
    depth?: number | null;
  }): Promise<void> {
    try {
      const graph = await this.api.getGraph(params);
      this.state.graph = graph;
      this.state.error = null;
      const ids = new Set(graph.nodes.map((n) => n.id));
      if (this.state.selected && !ids.has(this.state.selected)) this.state.selected = null;
      if (this.state.hover && !ids.has(this.state.hover)) this.state.hover = null;
    } catch (error) {
      this.state.error = error instanceof Error ? error.message : String(error);
    }
    this.render();
  }

  async retry(): Promise<void> {
    if (this.lastQuery?.element) await this.loadElement(this.lastQuery.element);
    else if (this.lastQuery?.root) await this.loadRoot(this.lastQuery.root);
  }

  render(): void {
    this.container.textContent = "";
    this.container.appendChild(this.renderControls());
    if (this.state.error) {
      this.container.appendChild(this.renderErrorBanner());
      return;
    }
    const graph = this.state.graph;
    if (!graph) return;
    if (graph.nodes.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-note";
      empty.textContent = "No matching nodes.";
      this.container.appendChild(empty);
      return;
    }
    this.container.appendChild(this.renderLegend());
    this.container.appendChild(this.renderSvg(graph));
    if (graph.truncated) {
      const note = document.createElement("p");
      note.className = "truncated-note";
      note.textContent = "… parts of the graph beyond the depth limit are not shown";
      this.container.appendChild(note);
    }
  }

  private renderControls(): HTMLElement {
    const bar = document.createElement("div");
    bar.className = "graph-controls";

    const filter = document.createElement("input");
    filter.className = "element-filter";
    filter.placeholder = "element symbol, e.g. Fe";
    filter.value = this.state.element;
    const go = document.createElement("button");
    go.className = "element-filter-go";
    go.textContent = "Filter by element";
    go.addEventListener("click", () => void this.loadElement(filter.value.trim()));

    const direction = document.createElement("select");
    direction.className = "direction-select";
    for (const value of ["both", "up", "down"] as Direction[]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      option.selected = value === this.state.direction;
      direction.appendChild(option);
    }
    direction.addEventListener("change", () => {
      this.state.direction = direction.value as Direction;
      if (this.lastQuery?.root) void this.loadRoot(this.lastQuery.root);
    });

    bar.append(filter, go, direction);
    return bar;
  }

  private renderErrorBanner(): HTMLElement {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    const text = document.createElement("span");
    text.textContent = `Could not load graph: ${this.state.error}`;
    const retry = document.createElement("button");
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void this.retry());
    banner.append(text, retry);
    return banner;
  }

  private renderLegend(): HTMLElement {
    const legend = document.createElement("div");
    legend.className = "legend";
    for (const [kind, color] of Object.entries(KIND_COLORS)) {
      const item = document.createElement("span");
      item.className = "legend-item";
      const swatch = document.createElement("span");
      swatch.className = "legend-swatch";
      swatch.style.background = color;
      item.append(swatch, document.createTextNode(kind));
      legend.appendChild(item);
    }
    return legend;
  }

  private renderSvg(graph: GraphJson): SVGSVGElement {
    const layout = layeredLayout(graph);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("class", "graph-canvas");
    svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
    svg.setAttribute("width", String(layout.width));
    svg.setAttribute("height", String(layout.height));

    for (const edge of graph.edges) {
      const from = layout.positions.get(edge.from);
      const to = layout.positions.get(edge.to);
      if (!from || !to) continue;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("class", "edge");
      line.setAttribute("x1", String(from.x));
      line.setAttribute("y1", String(from.y + NODE_HEIGHT / 2));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y - NODE_HEIGHT / 2));
      line.setAttribute("stroke", "#777");
      svg.appendChild(line);
    }

    for (const node of graph.nodes) {
      const pos = layout.positions.get(node.id)!;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("class", `node node-${node.kind}`);
      group.setAttribute("data-id", node.id);
      group.setAttribute("transform", `translate(${pos.x},${pos.y})`);

      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(-NODE_WIDTH / 2));
      rect.setAttribute("y", String(-NODE_HEIGHT / 2));
      rect.setAttribute("width", String(NODE_WIDTH));
      rect.setAttribute("height", String(NODE_HEIGHT));
      rect.setAttribute("rx", "6");
      rect.setAttribute("fill", KIND_COLORS[node.kind] ?? KIND_COLORS["other"]);
      rect.setAttribute(
        "stroke",
        node.id === this.state.selected ? "#222" : "#999",
      );

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("dy", "4");
      label.textContent =
        node.label.length > 20 ? node.label.slice(0, 19) + "…" : node.label;

      group.append(rect, label);
      group.addEventListener("mouseenter", (event) =>
        this.showTooltip(node.id, event as MouseEvent),
      );
      group.addEventListener("mouseleave", () => this.hideTooltip());
      group.addEventListener("click", () => {
        this.state.selected = node.id;
        this.onOpenRecord(node.id);
      });
      svg.appendChild(group);
    }
    return svg;
  }

  private showTooltip(nodeId: string, event: MouseEvent): void {
    const node = this.state.graph?.nodes.find((n) => n.id === nodeId);
    if (!node) return;
    this.hideTooltip();
    this.state.hover = nodeId;
    const tip = document.createElement("div");
    tip.className = "tooltip";
    tip.style.left = `${event.pageX + 12}px`;
    tip.style.top = `${event.pageY + 12}px`;
    const title = document.createElement("strong");
    title.textContent = `${node.label} (${node.kind})`;
    tip.appendChild(title);
    const list = document.createElement("dl");
    for (const [key, value] of Object.entries(node.tooltip)) {
      const dt = document.createElement("dt");
      dt.textContent = key;
      const dd = document.createElement("dd");
      dd.textContent = value; // verbatim from the API, no reformatting
      list.append(dt, dd);
    }
    tip.appendChild(list);
    this.container.appendChild(tip);
  }

  private hideTooltip(): void {
    this.state.hover = null;
    for (const tip of Array.from(this.container.querySelectorAll(".tooltip"))) {
      tip.remove();
    }
  }
}
