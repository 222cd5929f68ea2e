import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { QueryResponse } from "../src/api.js";
import { bootstrap } from "../src/main.js";

import degradedJson from "./fixtures/degraded_response.json";
import queryResponseJson from "./fixtures/query_response.json";
import statsJson from "./fixtures/stats.json";

const golden = queryResponseJson as QueryResponse;

function jsonResponse(payload: unknown) {
  return { ok: true, status: 200, statusText: "", json: () => Promise.resolve(payload) };
}

function submitQuery(outlet: HTMLElement, value: string): void {
  const input = outlet.querySelector<HTMLInputElement>("input[name=query]");
  const form = outlet.querySelector<HTMLFormElement>("form");
  expect(input).not.toBeNull();
  input!.value = value;
  form!.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

describe("bootstrap", () => {
  let outlet: HTMLElement;

  beforeEach(() => {
    // replaceState clears the fragment without queueing a hashchange; a
    // plain hash assignment is a navigation in jsdom and its async event
    // would re-render the view mid-test.
    window.history.replaceState(null, "", "/");
    document.body.innerHTML = '<main id="app"></main>';
    outlet = document.getElementById("app")!;
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it("opens on the query form", () => {
    vi.stubGlobal("fetch", vi.fn());
    bootstrap(outlet);
    expect(outlet.querySelector(".query-form")).not.toBeNull();
    expect(outlet.querySelector("input[name=query]")).not.toBeNull();
  });

  it("submitting the form renders a card per cited case", async () => {
    const mock = vi.fn().mockResolvedValue(jsonResponse(golden));
    vi.stubGlobal("fetch", mock);
    bootstrap(outlet);

    submitQuery(outlet, "murder acquittal");
    await vi.waitFor(() => {
      expect(outlet.querySelectorAll(".case-card")).toHaveLength(
        golden.cited_cases.length,
      );
    });

    const [url, init] = mock.mock.calls[0];
    expect(url).toBe("/api/query");
    expect(JSON.parse(init.body)).toEqual({ query: "murder acquittal", k: 3 });
    const names = Array.from(
      outlet.querySelectorAll(".case-card .case-name"),
      (node) => node.textContent,
    );
    expect(names).toEqual(golden.cited_cases.map((c) => c.case_name));
  });

  it("shows the degraded badge when the response is degraded", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(degradedJson)));
    bootstrap(outlet);

    submitQuery(outlet, "ships");
    await vi.waitFor(() => {
      expect(outlet.querySelector(".badge-degraded")).not.toBeNull();
    });
    expect(outlet.querySelectorAll(".case-card")).toHaveLength(0);
  });

  it("shows the API detail message when the server rejects the query", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn().mockResolvedValue({
        ok: false,
        status: 503,
        statusText: "",
        json: () => Promise.resolve({ detail: "index not loaded" }),
      }),
    );
    bootstrap(outlet);

    submitQuery(outlet, "anything");
    await vi.waitFor(() => {
      expect(outlet.querySelector(".error")).not.toBeNull();
    });
    expect(outlet.querySelector(".error")!.textContent).toContain(
      "index not loaded",
    );
    expect(outlet.querySelector(".error")!.textContent).toContain("503");
  });

  it("routes to the stats view and renders the table", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(statsJson)));
    bootstrap(outlet);

    window.history.replaceState(null, "", "/#/stats");
    window.dispatchEvent(new Event("hashchange"));
    await vi.waitFor(() => {
      expect(outlet.querySelector(".stats-table")).not.toBeNull();
    });
    const rows = outlet.querySelectorAll(".stats-table tbody tr");
    expect(rows).toHaveLength(Object.keys(statsJson).length);
  });

  it("passes a case-type filter through to the request body", async () => {
    const mock = vi.fn().mockResolvedValue(jsonResponse(golden));
    vi.stubGlobal("fetch", mock);
    bootstrap(outlet);

    const typeInput = outlet.querySelector<HTMLInputElement>(
      "input[name=case_type]",
    );
    typeInput!.value = "Probate";
    submitQuery(outlet, "estate");
    await vi.waitFor(() => expect(mock).toHaveBeenCalledOnce());

    expect(JSON.parse(mock.mock.calls[0][1].body)).toEqual({
      query: "estate",
      k: 3,
      filters: { case_type: "Probate" },
    });
  });
});
