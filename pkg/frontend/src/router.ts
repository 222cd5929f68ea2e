/**
 * Minimal hash router. Hash routing keeps every view on the single mounted
 * page, so the static file server never needs wildcard routes. A query
 * string after the hash path ("#/cases?page=2") is parsed separately and
 * handed to the handler.
 */

export type RouteParams = Record<string, string>;
export type RouteHandler = (params: RouteParams, query: URLSearchParams) => void;

interface CompiledRoute {
  pattern: RegExp;
  keys: string[];
  handler: RouteHandler;
}

function compile(path: string): { pattern: RegExp; keys: string[] } {
  const keys: string[] = [];
  const source = path
    .split("/")
    .map((segment) => {
      if (segment.startsWith(":")) {
        keys.push(segment.slice(1));
        return "([^/]+)";
      }
      return segment.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
    })
    .join("/");
  return { pattern: new RegExp(`^${source}$`), keys };
}

export class HashRouter {
  private routes: CompiledRoute[] = [];
  private fallback: RouteHandler | null = null;

  /** Register a handler for a path like "/cases/:id". */
  on(path: string, handler: RouteHandler): this {
    const { pattern, keys } = compile(path);
    this.routes.push({ pattern, keys, handler });
    return this;
  }

  otherwise(handler: RouteHandler): this {
    this.fallback = handler;
    return this;
  }

  /** Resolve the current location.hash and invoke the matching handler. */
  dispatch(): void {
    const raw = window.location.hash.replace(/^#/, "");
    const cut = raw.indexOf("?");
    const pathPart = cut === -1 ? raw : raw.slice(0, cut);
    const queryPart = cut === -1 ? "" : raw.slice(cut + 1);
    const path = pathPart === "" ? "/" : pathPart;
    const query = new URLSearchParams(queryPart);

    for (const route of this.routes) {
      const match = route.pattern.exec(path);
      if (match) {
        const params: RouteParams = {};
        route.keys.forEach((key, i) => {
          params[key] = decodeURIComponent(match[i + 1]);
        });
        route.handler(params, query);
        return;
      }
    }
    if (this.fallback) {
      this.fallback({}, query);
    }
  }

  /** Dispatch now and on every subsequent hash change. */
  start(): void {
    window.addEventListener("hashchange", () => this.dispatch());
    this.dispatch();
  }
}
