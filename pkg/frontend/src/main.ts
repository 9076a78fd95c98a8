import { ApiClient } from "./api.js";
import { mountApp } from "./ui.js";

mountApp(document, new ApiClient());
