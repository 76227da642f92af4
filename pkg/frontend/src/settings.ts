/** Settings pane: API base URL and bearer token, persisted locally. */

import { ApiClient, saveSettings } from "./api.js";

export class SettingsPane {
  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly onChanged: () => void = () => {},
  ) {}

  render(): void {
    this.container.textContent = "";
    const pane = document.createElement("div");
    pane.className = "settings";

    const urlLabel = document.createElement("label");
    urlLabel.textContent = "API base URL ";
    const url = document.createElement("input");
    url.className = "base-url-input";
    url.value = this.api.settings.baseUrl;
    url.placeholder = "http://127.0.0.1:8750";
    urlLabel.appendChild(url);

    const tokenLabel = document.createElement("label");
    tokenLabel.textContent = "Bearer token ";
    const token = document.createElement("input");
    token.className = "token-input";
    token.type = "password";
    token.value = this.api.settings.token;
    tokenLabel.appendChild(token);

    const save = document.createElement("button");
    save.className = "save-settings";
    save.textContent = "Save";
    save.addEventListener("click", () => {
      this.api.settings = { baseUrl: url.value.replace(/\/$/, ""), token: token.value };
      saveSettings(this.api.settings);
      this.onChanged();
      this.render();
    });

    const logout = document.createElement("button");
    logout.className = "logout-button";
    logout.textContent = "Log out";
    logout.addEventListener("click", () => {
      this.api.logout();
      this.onChanged();
      this.render();
    });

    pane.append(urlLabel, tokenLabel, save, logout);
    this.container.appendChild(pane);
  }
}
