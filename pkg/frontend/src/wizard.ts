/** Data-registration wizard.
 *
 * Steps: pick the owning entry (search or QR payload paste), pick the file,
 * pick the metadata parser, dry-run to preview the extracted fields, then
 * submit. A failing dry-run downgrades the parser to "none" with a visible
 * warning; the file can still be registered and enriched later.
 */

import { ApiClient, permIdFromQrPayload } from "./api.js";
import type { ObjectJson, ParseResultJson, ParserChoice } from "./types.js";

export interface RegistrationDraft {
  entry: string | null;
  entryLabel: string;
  file: File | null;
  parser: ParserChoice;
  datasetType: string;
  dryRun: ParseResultJson | null;
  warnings: string[];
}

/** Static display units per unified field; labels only, never conversions. */
export const FIELD_UNITS: Record<string, string> = {
  acceleration_voltage: "V",
  dwell_time: "s",
  stage_x: "m",
  stage_y: "m",
  stage_z: "m",
  stage_rotation: "rad",
  working_distance: "m",
  pixel_size: "m",
  emission_current: "A",
  beam_current: "A",
  frame_time: "s",
  line_time: "s",
  magnification: "",
  chamber_pressure: "Pa",
  system_vacuum: "Pa",
  gun_vacuum: "Pa",
  databar_rows: "rows",
  image_width_px: "px",
  image_height_px: "px",
};

export class RegistrationWizard {
  readonly draft: RegistrationDraft = {
    entry: null,
    entryLabel: "",
    file: null,
    parser: "none",
    datasetType: "",
    dryRun: null,
    warnings: [],
  };

  searchResults: ObjectJson[] = [];
  registeredId: string | null = null;
  errorMessage: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly onRegistered: (datasetId: string) => void = () => {},
  ) {}

  canSubmit(): boolean {
    return Boolean(this.draft.entry && this.draft.file && this.draft.datasetType);
  }

  /** Resolve free-form input: a pasted QR payload wins, else a search. */
  async resolveEntry(input: string): Promise<void> {
    const fromPayload = permIdFromQrPayload(input);
    if (fromPayload) {
      try {
        const record = await this.api.getObject(fromPayload);
        this.setEntry(record);
        this.searchResults = [];
      } catch (error) {
        this.draft.entry = null;
        this.errorMessage = error instanceof Error ? error.message : String(error);
      }
    } else {
      this.errorMessage = null;
      this.searchResults = await this.api.searchObjects(input);
    }
    this.render();
  }

  setEntry(record: ObjectJson): void {
    this.draft.entry = record.perm_id;
    this.draft.entryLabel = String(record.properties["name"] ?? record.perm_id);
    this.errorMessage = null;
  }

  setFile(file: File | null): void {
    this.draft.file = file;
    this.draft.dryRun = null;
  }

  setParser(parser: ParserChoice): void {
    this.draft.parser = parser;
    this.draft.dryRun = null;
  }

  async runDryRun(): Promise<void> {
    if (!this.draft.file || !this.draft.entry || this.draft.parser === "none") return;
    try {
      const result = (await this.api.uploadDataset({
        file: this.draft.file,
        entry: this.draft.entry,
        type: this.draft.datasetType || "OTHER",
        format: this.draft.parser,
        dryRun: true,
      })) as ParseResultJson;
      this.draft.dryRun = result;
      this.draft.warnings = [...result.warnings];
    } catch (error) {
      // parser mismatch or parse failure: downgrade, registration stays possible
      const message = error instanceof Error ? error.message : String(error);
      this.draft.parser = "none";
      this.draft.dryRun = null;
      this.draft.warnings = [
        `Dry run failed (${message}); parser reset to none. ` +
          "The file can still be registered and enriched later.",
      ];
    }
    this.render();
  }

  async submit(): Promise<void> {
    if (!this.canSubmit()) return;
    const record = (await this.api.uploadDataset({
      file: this.draft.file!,
      entry: this.draft.entry!,
      type: this.draft.datasetType,
      format: this.draft.parser,
      dryRun: false,
    })) as { dataset_id: string };
    this.registeredId = record.dataset_id;
    this.onRegistered(record.dataset_id);
    this.render();
  }

  render(): void {
    this.container.textContent = "";
    const form = document.createElement("div");
    form.className = "wizard";

    form.appendChild(this.renderEntryStep());
    form.appendChild(this.renderFileStep());
    form.appendChild(this.renderParserStep());
    form.appendChild(this.renderDryRunStep());
    form.appendChild(this.renderSubmitStep());

    if (this.errorMessage) {
      const error = document.createElement("p");
      error.className = "inline-error";
      error.textContent = this.errorMessage;
      form.appendChild(error);
    }
    this.container.appendChild(form);
  }

  private step(title: string): HTMLElement {
    const section = document.createElement("section");
    const heading = document.createElement("h3");
    heading.textContent = title;
    section.appendChild(heading);
    return section;
  }

  private renderEntryStep(): HTMLElement {
    const section = this.step("1. Entry");
    const input = document.createElement("input");
    input.className = "entry-input";
    input.placeholder = "search entries or paste rdm://object/… payload";
    const button = document.createElement("button");
    button.className = "entry-resolve";
    button.textContent = "Find";
    button.addEventListener("click", () => void this.resolveEntry(input.value));
    section.append(input, button);

    if (this.searchResults.length > 0) {
      const list = document.createElement("ul");
      list.className = "entry-results";
      for (const record of this.searchResults) {
        const item = document.createElement("li");
        const pick = document.createElement("button");
        pick.textContent = `${record.properties["name"] ?? record.perm_id} (${record.type_name})`;
        pick.addEventListener("click", () => {
          this.setEntry(record);
          this.searchResults = [];
          this.render();
        });
        item.appendChild(pick);
        list.appendChild(item);
      }
      section.appendChild(list);
    }
    if (this.draft.entry) {
      const chosen = document.createElement("p");
      chosen.className = "entry-chosen";
      chosen.textContent = `Selected: ${this.draft.entryLabel} (${this.draft.entry})`;
      section.appendChild(chosen);
    }
    return section;
  }

  private renderFileStep(): HTMLElement {
    const section = this.step("2. File");
    const input = document.createElement("input");
    input.type = "file";
    input.className = "file-input";
    input.addEventListener("change", () => {
      this.setFile(input.files?.[0] ?? null);
      this.render();
    });
    section.appendChild(input);
    if (this.draft.file) {
      const note = document.createElement("p");
      note.textContent = `Chosen: ${this.draft.file.name} (${this.draft.file.size} B)`;
      section.appendChild(note);
    }
    return section;
  }

  private renderParserStep(): HTMLElement {
    const section = this.step("3. Parser and dataset type");
    const parser = document.createElement("select");
    parser.className = "parser-select";
    for (const value of ["none", "VendorA", "VendorB", "VendorC"] as ParserChoice[]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      option.selected = value === this.draft.parser;
      parser.appendChild(option);
    }
    parser.addEventListener("change", () => this.setParser(parser.value as ParserChoice));

    const type = document.createElement("input");
    type.className = "dataset-type-input";
    type.placeholder = "dataset type, e.g. SEM_IMAGE";
    type.value = this.draft.datasetType;
    type.addEventListener("input", () => {
      this.draft.datasetType = type.value.trim();
    });
    type.addEventListener("change", () => this.render());
    section.append(parser, type);
    return section;
  }

  private renderDryRunStep(): HTMLElement {
    const section = this.step("4. Dry run");
    const button = document.createElement("button");
    button.className = "dry-run-button";
    button.textContent = "Preview extracted metadata";
    button.disabled = !this.draft.file || !this.draft.entry || this.draft.parser === "none";
    button.addEventListener("click", () => void this.runDryRun());
    section.appendChild(button);

    for (const warning of this.draft.warnings) {
      const note = document.createElement("p");
      note.className = "warning";
      note.textContent = warning;
      section.appendChild(note);
    }

    if (this.draft.dryRun) {
      const table = document.createElement("table");
      table.className = "dry-run-table";
      for (const [field, value] of Object.entries(this.draft.dryRun.unified)) {
        if (field === "ontology_iri") continue;
        const row = document.createElement("tr");
        const name = document.createElement("td");
        name.textContent = field;
        const cell = document.createElement("td");
        // value verbatim from the API; the unit is a static label
        cell.textContent = `${String(value)} ${FIELD_UNITS[field] ?? ""}`.trim();
        row.append(name, cell);
        table.appendChild(row);
      }
      section.appendChild(table);
    }
    return section;
  }

  private renderSubmitStep(): HTMLElement {
    const section = this.step("5. Register");
    const button = document.createElement("button");
    button.className = "submit-button";
    button.textContent = "Register dataset";
    button.disabled = !this.canSubmit();
    button.addEventListener("click", () => void this.submit());
    section.appendChild(button);
    if (this.registeredId) {
      const done = document.createElement("p");
      done.className = "registered-note";
      done.textContent = `Registered as ${this.registeredId}`;
      section.appendChild(done);
    }
    return section;
  }
}
