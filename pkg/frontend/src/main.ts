import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app root element");
}

// same-origin by default; ?api=http://host:port points at a remote service
const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
const app = new App(root, new ApiClient({ baseUrl: apiBase }));

for (const domain of ["sudoku", "roguelike"] as const) {
  const button = document.getElementById(`start-${domain}`);
  button?.addEventListener("click", () => {
    void app.start(domain);
  });
}
