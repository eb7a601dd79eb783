/** Browser entry point: mount the app on #app against the same-origin API. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

new App({
  client: new ApiClient("/api/v1"),
  root: document.getElementById("app")!,
  window,
}).start();
