import { Client } from "./api.js";
import { wireApp } from "./controller.js";

document.addEventListener("DOMContentLoaded", () => {
  wireApp(document, new Client(""));
});
