/**
 * Pure DOM builders. Every function takes payload data and returns a
 * detached element, so views are testable without a server. Data always
 * flows through textContent, never innerHTML.
 */

import type {
  CaseDetail,
  CasePage,
  CaseRecord,
  CitedCase,
  QueryResponse,
  RetrievedChunk,
  Stats,
} from "./api.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function field(label: string, value: string): HTMLElement {
  const row = el("div", "field");
  row.appendChild(el("span", "field-label", label));
  row.appendChild(el("span", "field-value", value));
  return row;
}

export function renderCaseCard(cited: CitedCase): HTMLElement {
  const card = el("article", "case-card");
  card.dataset.docId = cited.doc_id;

  const title = el("h3", "case-name", cited.case_name);
  card.appendChild(title);
  card.appendChild(field("Date", cited.date));
  card.appendChild(field("Outcome", cited.outcome));
  card.appendChild(field("Citations", cited.citations.join("; ")));
  card.appendChild(field("Provisions", cited.provisions.join("; ")));
  card.appendChild(el("p", "case-summary", cited.judgment_summary));

  const link = el("a", "case-link", "Full record");
  link.href = `#/cases/${encodeURIComponent(cited.doc_id)}`;
  card.appendChild(link);
  return card;
}

function renderEvidence(hit: RetrievedChunk): HTMLElement {
  const item = el("li", "evidence");
  const head = el("div", "evidence-head");
  head.appendChild(el("span", "evidence-doc", hit.doc_id));
  head.appendChild(el("span", "evidence-score", hit.score.toFixed(4)));
  item.appendChild(head);
  item.appendChild(el("p", "evidence-text", hit.text));
  return item;
}

export function renderAnswer(res: QueryResponse): HTMLElement {
  const root = el("section", "answer");

  if (res.degraded) {
    root.appendChild(
      el("span", "badge badge-degraded", "degraded: answer unavailable"),
    );
  }
  if (res.parse_miss && !res.degraded) {
    root.appendChild(
      el("span", "badge badge-parse-miss", "unstructured answer"),
    );
  }

  if (res.answer_text) {
    root.appendChild(el("pre", "answer-text", res.answer_text));
  }

  const cards = el("div", "case-cards");
  for (const cited of res.cited_cases) {
    cards.appendChild(renderCaseCard(cited));
  }
  root.appendChild(cards);

  if (res.retrieved.length > 0) {
    root.appendChild(el("h3", "evidence-title", "Retrieved passages"));
    const list = el("ul", "evidence-list");
    for (const hit of res.retrieved) {
      list.appendChild(renderEvidence(hit));
    }
    root.appendChild(list);
  }
  return root;
}

export function renderStats(stats: Stats): HTMLElement {
  const table = el("table", "stats-table");
  const head = table.createTHead().insertRow();
  head.appendChild(el("th", undefined, "Case type"));
  head.appendChild(el("th", undefined, "Judgments"));

  const body = table.createTBody();
  let total = 0;
  for (const [caseType, count] of Object.entries(stats)) {
    const row = body.insertRow();
    row.insertCell().textContent = caseType;
    row.insertCell().textContent = String(count);
    total += count;
  }
  const foot = table.createTFoot().insertRow();
  foot.appendChild(el("td", undefined, "Total"));
  foot.appendChild(el("td", undefined, String(total)));
  return table;
}

export function renderCaseList(page: CasePage): HTMLElement {
  const root = el("section", "case-list");
  root.appendChild(
    el(
      "p",
      "case-count",
      `${page.total} judgment${page.total === 1 ? "" : "s"}, page ${page.page}`,
    ),
  );
  const list = el("ul", "case-rows");
  for (const record of page.cases) {
    list.appendChild(renderCaseRow(record));
  }
  root.appendChild(list);
  return root;
}

function renderCaseRow(record: CaseRecord): HTMLElement {
  const item = el("li", "case-row");
  const link = el("a", "case-row-link", record.case_name);
  link.href = `#/cases/${encodeURIComponent(record.doc_id)}`;
  item.appendChild(link);
  item.appendChild(el("span", "case-row-date", record.date));
  item.appendChild(el("span", "case-row-type", record.case_type));
  return item;
}

const DETAIL_FIELDS: ReadonlyArray<[keyof CaseRecord, string]> = [
  ["case_name", "Case name"],
  ["date", "Date"],
  ["appellant", "Appellant"],
  ["respondent", "Respondent"],
  ["judges", "Judges"],
  ["citations", "Citations"],
  ["related_provisions", "Provisions"],
  ["case_type", "Case type"],
  ["outcome_of_appellant", "Outcome"],
  ["judgement", "Judgement"],
  ["summary", "Headnote"],
];

export function renderCaseDetail(detail: CaseDetail): HTMLElement {
  const root = el("article", "case-detail");
  root.appendChild(el("h2", "case-name", detail.case_name));

  const dl = el("dl", "detail-fields");
  for (const [key, label] of DETAIL_FIELDS) {
    const value = detail[key];
    dl.appendChild(el("dt", undefined, label));
    dl.appendChild(
      el("dd", undefined, Array.isArray(value) ? value.join("; ") : value),
    );
  }
  root.appendChild(dl);

  if (detail.generated_summary) {
    root.appendChild(el("h3", undefined, "Generated summary"));
    root.appendChild(el("p", "generated-summary", detail.generated_summary));
  }
  return root;
}

export function renderError(message: string): HTMLElement {
  return el("p", "error", message);
}

export function renderLoading(): HTMLElement {
  return el("p", "loading", "Loading...");
}
