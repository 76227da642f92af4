/** Dataset browser: preview grid with multi-select slide-deck download. */

import type { ApiClient } from "./api.js";
import type { DatasetJson } from "./types.js";

export class DatasetBrowser {
  datasets: DatasetJson[] = [];
  readonly selection = new Set<string>();
  private entry: string | null = null;
  private previewUrls = new Map<string, string>();

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly download: (blob: Blob, filename: string) => void = defaultDownload,
  ) {}

  async load(entry: string): Promise<void> {
    this.entry = entry;
    this.datasets = await this.api.listDatasets(entry);
    this.selection.clear();
    this.previewUrls.clear();
    this.render();
    await this.loadPreviews();
  }

  private async loadPreviews(): Promise<void> {
    for (const dataset of this.datasets) {
      if (!dataset.preview) continue;
      try {
        const blob = await this.api.fetchPreview(dataset.dataset_id);
        if (blob) {
          this.previewUrls.set(dataset.dataset_id, URL.createObjectURL(blob));
        }
      } catch {
        // tile falls back to the placeholder
      }
    }
    this.render();
  }

  toggle(datasetId: string): void {
    if (this.selection.has(datasetId)) this.selection.delete(datasetId);
    else this.selection.add(datasetId);
    this.render();
  }

  canCreateDeck(): boolean {
    return this.selection.size > 0;
  }

  async createDeck(title = "Selected datasets"): Promise<void> {
    if (!this.canCreateDeck()) return;
    // request order follows the on-screen (sorted) dataset order
    const ordered = this.datasets
      .map((d) => d.dataset_id)
      .filter((id) => this.selection.has(id));
    const blob = await this.api.createDeck(ordered, title);
    this.download(blob, "slide_deck.html");
  }

  render(): void {
    this.container.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = this.entry ? `Datasets of ${this.entry}` : "Datasets";
    this.container.appendChild(heading);

    const grid = document.createElement("div");
    grid.className = "dataset-grid";
    for (const dataset of this.datasets) {
      grid.appendChild(this.renderTile(dataset));
    }
    this.container.appendChild(grid);

    const button = document.createElement("button");
    button.className = "create-deck-button";
    button.textContent = `Create slides (${this.selection.size})`;
    button.disabled = !this.canCreateDeck();
    button.addEventListener("click", () => void this.createDeck());
    this.container.appendChild(button);
  }

  private renderTile(dataset: DatasetJson): HTMLElement {
    const tile = document.createElement("label");
    tile.className = "dataset-tile";
    tile.dataset["id"] = dataset.dataset_id;

    const checkbox = document.createElement("input");
    checkbox.type = "checkbox";
    checkbox.checked = this.selection.has(dataset.dataset_id);
    checkbox.addEventListener("change", () => this.toggle(dataset.dataset_id));
    tile.appendChild(checkbox);

    const url = this.previewUrls.get(dataset.dataset_id);
    if (url) {
      const img = document.createElement("img");
      img.src = url;
      img.alt = dataset.original_filename;
      tile.appendChild(img);
    } else {
      const placeholder = document.createElement("div");
      placeholder.className = "preview-placeholder";
      placeholder.textContent = dataset.dataset_type;
      tile.appendChild(placeholder);
    }

    const caption = document.createElement("span");
    caption.className = "tile-caption";
    caption.textContent = dataset.original_filename || dataset.dataset_id;
    tile.appendChild(caption);
    return tile;
  }
}

function defaultDownload(blob: Blob, filename: string): void {
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  document.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
