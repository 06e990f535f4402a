import { mount } from "./app.js";

declare global {
  interface Window {
    NORMKIT_BASE?: string;
  }
}

function main() {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  mount(root, window.NORMKIT_BASE ?? "");
}

window.addEventListener("load", main);
