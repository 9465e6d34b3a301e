export * from "./protocol.js";
export * from "./render.js";
export * from "./transport.js";
export * from "./session.js";
