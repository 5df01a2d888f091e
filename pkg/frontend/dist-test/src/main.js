import { ApiClient } from "./client.js";
import { Controller } from "./controller.js";
import { render, wire } from "./dom.js";
const api = new ApiClient((path, init) => fetch(path, init));
const controller = new Controller(api, render);
wire(controller);
void controller.refresh();
