/**
 * Application shell: wires the hash router to the API client and the DOM
 * builders. All rendering goes through the #app outlet.
 */

import {
  ApiError,
  fetchCase,
  fetchCases,
  fetchStats,
  postQuery,
} from "./api.js";
import {
  renderAnswer,
  renderCaseDetail,
  renderCaseList,
  renderError,
  renderLoading,
  renderStats,
} from "./render.js";
import { HashRouter } from "./router.js";

function show(outlet: HTMLElement, node: HTMLElement): void {
  outlet.replaceChildren(node);
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.message} (status ${err.status})`;
  }
  return err instanceof Error ? err.message : String(err);
}

function queryView(outlet: HTMLElement): void {
  const section = document.createElement("section");
  section.className = "query-view";

  const form = document.createElement("form");
  form.className = "query-form";

  const input = document.createElement("input");
  input.type = "search";
  input.name = "query";
  input.placeholder = "Ask about the indexed judgments";
  input.required = true;

  const kSelect = document.createElement("select");
  kSelect.name = "k";
  for (const k of [1, 2, 3, 5, 8]) {
    const option = document.createElement("option");
    option.value = String(k);
    option.textContent = `top ${k}`;
    if (k === 3) {
      option.selected = true;
    }
    kSelect.appendChild(option);
  }

  const typeInput = document.createElement("input");
  typeInput.type = "text";
  typeInput.name = "case_type";
  typeInput.placeholder = "Case type filter (optional)";

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Search";

  form.append(input, kSelect, typeInput, submit);

  const results = document.createElement("div");
  results.className = "query-results";

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const query = input.value.trim();
    if (!query) {
      return;
    }
    const caseType = typeInput.value.trim();
    show(results, renderLoading());
    postQuery({
      query,
      k: Number(kSelect.value),
      ...(caseType ? { filters: { case_type: caseType } } : {}),
    })
      .then((res) => show(results, renderAnswer(res)))
      .catch((err) => show(results, renderError(describe(err))));
  });

  section.append(form, results);
  show(outlet, section);
}

function casesView(outlet: HTMLElement, page: number): void {
  show(outlet, renderLoading());
  fetchCases(page)
    .then((casePage) => {
      const section = renderCaseList(casePage);
      const nav = document.createElement("div");
      nav.className = "pager";
      if (casePage.page > 1) {
        const prev = document.createElement("a");
        prev.href = `#/cases?page=${casePage.page - 1}`;
        prev.textContent = "Previous";
        nav.appendChild(prev);
      }
      if (casePage.page * casePage.page_size < casePage.total) {
        const next = document.createElement("a");
        next.href = `#/cases?page=${casePage.page + 1}`;
        next.textContent = "Next";
        nav.appendChild(next);
      }
      section.appendChild(nav);
      show(outlet, section);
    })
    .catch((err) => show(outlet, renderError(describe(err))));
}

function caseDetailView(outlet: HTMLElement, docId: string): void {
  show(outlet, renderLoading());
  fetchCase(docId)
    .then((detail) => show(outlet, renderCaseDetail(detail)))
    .catch((err) => show(outlet, renderError(describe(err))));
}

function statsView(outlet: HTMLElement): void {
  show(outlet, renderLoading());
  fetchStats()
    .then((stats) => show(outlet, renderStats(stats)))
    .catch((err) => show(outlet, renderError(describe(err))));
}

export function bootstrap(outlet: HTMLElement): HashRouter {
  const router = new HashRouter();
  router
    .on("/", () => queryView(outlet))
    .on("/cases", (_params, query) => {
      const page = Number.parseInt(query.get("page") ?? "1", 10);
      casesView(outlet, Number.isNaN(page) || page < 1 ? 1 : page);
    })
    .on("/cases/:id", (params) => caseDetailView(outlet, params.id))
    .on("/stats", () => statsView(outlet))
    .otherwise(() => queryView(outlet));
  router.start();
  return router;
}

const outlet = document.getElementById("app");
if (outlet) {
  bootstrap(outlet);
}
