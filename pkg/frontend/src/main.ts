import { createHttpClient } from "./api.js";
import { SessionStore } from "./session.js";
import { ExplorerView } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8000";

const client = createHttpClient(base);
const store = new SessionStore(client);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
new ExplorerView(root, store, client);
