/** Application shell: hash routing between the explorer, wizard, browser,
 * record pages, and settings. Deep links of the form
 * ``#/object/<permId>`` correspond to scanned QR payloads. */

import { ApiClient, loadSettings, permIdFromQrPayload } from "./api.js";
import { DatasetBrowser } from "./browser.js";
import { GraphExplorer } from "./graphView.js";
import { SettingsPane } from "./settings.js";
import { RegistrationWizard } from "./wizard.js";

export class App {
  readonly api: ApiClient;
  private readonly view: HTMLElement;

  constructor(private readonly root: HTMLElement) {
    this.api = new ApiClient(loadSettings());
    this.root.appendChild(this.renderNav());
    this.view = document.createElement("main");
    this.root.appendChild(this.view);
    window.addEventListener("hashchange", () => void this.route());
  }

  private renderNav(): HTMLElement {
    const nav = document.createElement("nav");
    for (const [label, hash] of [
      ["Graph", "#/graph"],
      ["Register", "#/register"],
      ["Datasets", "#/datasets"],
      ["Settings", "#/settings"],
    ]) {
      const link = document.createElement("a");
      link.href = hash;
      link.textContent = label;
      nav.appendChild(link);
    }
    return nav;
  }

  async route(): Promise<void> {
    const hash = window.location.hash || "#/graph";
    this.view.textContent = "";
    const [, page, argRaw] = hash.split("/", 3);
    const arg = argRaw ? decodeURIComponent(argRaw) : "";

    if (page === "register") {
      new RegistrationWizard(this.view, this.api, (id) => {
        window.location.hash = `#/datasets/${id}`;
      }).render();
      return;
    }
    if (page === "settings") {
      new SettingsPane(this.view, this.api).render();
      return;
    }
    if (page === "object" && arg) {
      await this.renderRecordPage(arg);
      return;
    }
    if (page === "datasets") {
      const browser = new DatasetBrowser(this.view, this.api);
      if (arg) await browser.load(arg);
      else browser.render();
      return;
    }
    // default: graph explorer; "#/graph/<permId>" roots it at a record
    const explorer = new GraphExplorer(this.view, this.api, (id) => {
      window.location.hash = `#/object/${id}`;
    });
    const fromPayload = permIdFromQrPayload(arg);
    if (fromPayload ?? arg) await explorer.loadRoot(fromPayload ?? arg);
    else explorer.render();
  }

  private async renderRecordPage(permId: string): Promise<void> {
    const record = await this.api.getObject(permId);
    const heading = document.createElement("h2");
    heading.textContent = `${record.properties["name"] ?? permId} — ${record.type_name}`;
    this.view.appendChild(heading);

    const table = document.createElement("table");
    table.className = "record-properties";
    for (const [key, value] of Object.entries(record.properties)) {
      const row = document.createElement("tr");
      const name = document.createElement("td");
      name.textContent = key;
      const cell = document.createElement("td");
      cell.textContent = typeof value === "string" ? value : JSON.stringify(value);
      row.append(name, cell);
      table.appendChild(row);
    }
    this.view.appendChild(table);

    const links = document.createElement("p");
    const graphLink = document.createElement("a");
    graphLink.href = `#/graph/${record.perm_id}`;
    graphLink.textContent = "Show provenance graph";
    const datasetsLink = document.createElement("a");
    datasetsLink.href = `#/datasets/${record.perm_id}`;
    datasetsLink.textContent = "Browse datasets";
    links.append(graphLink, document.createTextNode(" · "), datasetsLink);
    this.view.appendChild(links);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const app = new App(document.getElementById("app")!);
  void app.route();
}
