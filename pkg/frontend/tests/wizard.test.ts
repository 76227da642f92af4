import { describe, expect, it, vi } from "vitest";

import { RegistrationWizard } from "../src/wizard.js";
import type { ObjectJson, ParseResultJson } from "../src/types.js";
import { fakeApi, fixture, mount } from "./helpers.js";

const DRY_RUN = fixture<ParseResultJson>("dry_run_vendor_a.json");
const ENTRY = fixture<ObjectJson>("object_entry.json");
const SEARCH = fixture<{ objects: ObjectJson[] }>("objects_search.json");

function file(): File {
  return new File([new Uint8Array([1, 2, 3])], "pillar.va");
}

describe("RegistrationWizard", () => {
  it("submit is blocked until entry, file, and dataset type are set", () => {
    const wizard = new RegistrationWizard(mount(), fakeApi({}));
    expect(wizard.canSubmit()).toBe(false);
    wizard.setEntry(ENTRY);
    expect(wizard.canSubmit()).toBe(false);
    wizard.setFile(file());
    expect(wizard.canSubmit()).toBe(false);
    wizard.draft.datasetType = "SEM_IMAGE";
    expect(wizard.canSubmit()).toBe(true);
    wizard.render();
    const button = document.querySelector<HTMLButtonElement>(".submit-button")!;
    expect(button.disabled).toBe(false);
  });

  it("dry run shows acceleration_voltage 20000 V before any upload", async () => {
    let registered = 0;
    const api = fakeApi({
      uploadDataset: async (options: { dryRun?: boolean }) => {
        if (!options.dryRun) registered += 1;
        return DRY_RUN;
      },
    });
    const container = mount();
    const wizard = new RegistrationWizard(container, api);
    wizard.setEntry(ENTRY);
    wizard.setFile(file());
    wizard.setParser("VendorA");
    wizard.draft.datasetType = "SEM_IMAGE";
    await wizard.runDryRun();

    const table = container.querySelector(".dry-run-table")!;
    const rows = Array.from(table.querySelectorAll("tr"), (r) => r.textContent);
    expect(rows.some((r) => r?.includes("acceleration_voltage") && r.includes("20000 V"))).toBe(true);
    expect(registered).toBe(0); // nothing was registered by the preview
  });

  it("a failing dry run downgrades the parser to none with a visible warning", async () => {
    const api = fakeApi({
      uploadDataset: async (options: { dryRun?: boolean }) => {
        if (options.dryRun) throw new Error("vendor A magic not present");
        return { dataset_id: "20260101000000000-9" };
      },
    });
    const container = mount();
    const wizard = new RegistrationWizard(container, api);
    wizard.setEntry(ENTRY);
    wizard.setFile(file());
    wizard.setParser("VendorA");
    wizard.draft.datasetType = "SEM_IMAGE";
    await wizard.runDryRun();

    expect(wizard.draft.parser).toBe("none");
    const warning = container.querySelector(".warning")!;
    expect(warning.textContent).toContain("parser reset to none");
    // registration is still possible
    expect(wizard.canSubmit()).toBe(true);
    await wizard.submit();
    expect(wizard.registeredId).toBe("20260101000000000-9");
  });

  it("resolves a pasted QR payload to its record", async () => {
    const api = fakeApi({
      getObject: async (permId: string) => {
        expect(permId).toBe(ENTRY.perm_id);
        return ENTRY;
      },
    });
    const wizard = new RegistrationWizard(mount(), api);
    await wizard.resolveEntry(`rdm://object/${ENTRY.perm_id}`);
    expect(wizard.draft.entry).toBe(ENTRY.perm_id);
    expect(wizard.draft.entryLabel).toBe("FeAl imaging");
  });

  it("an unknown pasted id shows an inline not-found message", async () => {
    const api = fakeApi({
      getObject: async () => {
        throw new Error("no object with permId 20000101000000000-1");
      },
    });
    const container = mount();
    const wizard = new RegistrationWizard(container, api);
    await wizard.resolveEntry("rdm://object/20000101000000000-1");
    expect(wizard.draft.entry).toBeNull();
    expect(container.querySelector(".inline-error")!.textContent).toContain("no object");
  });

  it("free-text input searches entries and picking one selects it", async () => {
    const api = fakeApi({ searchObjects: async () => SEARCH.objects });
    const container = mount();
    const wizard = new RegistrationWizard(container, api);
    await wizard.resolveEntry("imaging");
    const results = container.querySelectorAll(".entry-results button");
    expect(results.length).toBe(SEARCH.objects.length);
    (results[0] as HTMLButtonElement).click();
    expect(wizard.draft.entry).toBe(SEARCH.objects[0].perm_id);
  });

  it("submitting registers through the API and reports the new id", async () => {
    const calls: unknown[] = [];
    const api = fakeApi({
      uploadDataset: async (options: unknown) => {
        calls.push(options);
        return { dataset_id: "20260101000000000-7" };
      },
    });
    const registered = vi.fn();
    const container = mount();
    const wizard = new RegistrationWizard(container, api, registered);
    wizard.setEntry(ENTRY);
    wizard.setFile(file());
    wizard.setParser("VendorA");
    wizard.draft.datasetType = "SEM_IMAGE";
    await wizard.submit();
    expect(registered).toHaveBeenCalledWith("20260101000000000-7");
    expect(calls[0]).toMatchObject({ entry: ENTRY.perm_id, type: "SEM_IMAGE", format: "VendorA" });
    expect(container.querySelector(".registered-note")!.textContent).toContain(
      "20260101000000000-7",
    );
  });
});
