import { ApiClient } from "./api.js";
import { App } from "./app.js";

// Configuration is limited to the API base URL: ?api=http://host:port,
// same-origin by default.
const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "");

const root = document.getElementById("app");
if (root) {
  const app = new App(root, api);
  app.init().catch((error) => {
    root.innerHTML = `<div class="error-box">cannot reach the service: ${String(error)}</div>`;
  });
}
