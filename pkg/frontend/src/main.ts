import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { Renderer } from "./render.js";

const base = new URLSearchParams(location.search).get("api") ?? location.origin;
const app = new App(new ApiClient(base));
const renderer = new Renderer(app, document.getElementById("root")!);

app
  .init()
  .then(() => renderer.renderAll())
  .catch((error) => {
    const root = document.getElementById("root")!;
    root.textContent = `cannot reach the API at ${base}: ${error}`;
  });
