import { describe, expect, it } from "vitest";

import type {
  CaseDetail,
  CasePage,
  QueryResponse,
  Stats,
} from "../src/api.js";
import {
  renderAnswer,
  renderCaseDetail,
  renderCaseList,
  renderStats,
} from "../src/render.js";

import casesPageJson from "./fixtures/cases_page.json";
import caseDetailJson from "./fixtures/case_detail.json";
import degradedJson from "./fixtures/degraded_response.json";
import queryResponseJson from "./fixtures/query_response.json";
import statsJson from "./fixtures/stats.json";

const golden = queryResponseJson as QueryResponse;
const degraded = degradedJson as QueryResponse;
const stats = statsJson as Stats;
const casesPage = casesPageJson as CasePage;
const caseDetail = caseDetailJson as CaseDetail;

function text(root: HTMLElement, selector: string): string {
  const node = root.querySelector(selector);
  expect(node, `missing ${selector}`).not.toBeNull();
  return node!.textContent ?? "";
}

describe("renderAnswer with a captured response", () => {
  const root = renderAnswer(golden);

  it("renders one card per cited case", () => {
    expect(root.querySelectorAll(".case-card")).toHaveLength(
      golden.cited_cases.length,
    );
  });

  it("card fields equal the payload values", () => {
    const cards = root.querySelectorAll<HTMLElement>(".case-card");
    golden.cited_cases.forEach((cited, i) => {
      const card = cards[i];
      expect(card.dataset.docId).toBe(cited.doc_id);
      expect(text(card, ".case-name")).toBe(cited.case_name);
      expect(text(card, ".case-summary")).toBe(cited.judgment_summary);

      const values = Array.from(
        card.querySelectorAll<HTMLElement>(".field-value"),
        (node) => node.textContent,
      );
      expect(values).toEqual([
        cited.date,
        cited.outcome,
        cited.citations.join("; "),
        cited.provisions.join("; "),
      ]);

      const link = card.querySelector<HTMLAnchorElement>(".case-link");
      expect(link?.getAttribute("href")).toBe(
        `#/cases/${encodeURIComponent(cited.doc_id)}`,
      );
    });
  });

  it("shows the answer text verbatim", () => {
    expect(text(root, ".answer-text")).toBe(golden.answer_text);
  });

  it("lists every retrieved passage with doc id and score", () => {
    const items = root.querySelectorAll<HTMLElement>(".evidence");
    expect(items).toHaveLength(golden.retrieved.length);
    golden.retrieved.forEach((hit, i) => {
      expect(text(items[i], ".evidence-doc")).toBe(hit.doc_id);
      expect(text(items[i], ".evidence-score")).toBe(hit.score.toFixed(4));
      expect(text(items[i], ".evidence-text")).toBe(hit.text);
    });
  });

  it("shows no badge on a healthy response", () => {
    expect(root.querySelector(".badge")).toBeNull();
  });
});

describe("renderAnswer with a degraded response", () => {
  const root = renderAnswer(degraded);

  it("shows the degraded badge", () => {
    const badge = root.querySelector(".badge-degraded");
    expect(badge).not.toBeNull();
    expect(badge!.textContent).toContain("degraded");
  });

  it("renders no cards and no answer text", () => {
    expect(degraded.degraded).toBe(true);
    expect(root.querySelectorAll(".case-card")).toHaveLength(0);
    expect(root.querySelector(".answer-text")).toBeNull();
  });
});

describe("renderStats", () => {
  it("renders one row per case type matching the payload exactly", () => {
    const table = renderStats(stats);
    const rows = Array.from(
      table.querySelectorAll<HTMLTableRowElement>("tbody tr"),
      (row) => [row.cells[0].textContent, Number(row.cells[1].textContent)],
    );
    expect(rows).toEqual(Object.entries(stats));
  });

  it("totals the counts in the footer", () => {
    const table = renderStats(stats);
    const total = Object.values(stats).reduce((a, b) => a + b, 0);
    const foot = table.querySelector("tfoot tr");
    expect(foot!.textContent).toContain(String(total));
  });
});

describe("renderCaseList", () => {
  const root = renderCaseList(casesPage);

  it("renders one row per case with name, date, and type", () => {
    const rows = root.querySelectorAll<HTMLElement>(".case-row");
    expect(rows).toHaveLength(casesPage.cases.length);
    casesPage.cases.forEach((record, i) => {
      expect(text(rows[i], ".case-row-link")).toBe(record.case_name);
      expect(text(rows[i], ".case-row-date")).toBe(record.date);
      expect(text(rows[i], ".case-row-type")).toBe(record.case_type);
    });
  });

  it("links each row to the case detail route", () => {
    const links = root.querySelectorAll<HTMLAnchorElement>(".case-row-link");
    casesPage.cases.forEach((record, i) => {
      expect(links[i].getAttribute("href")).toBe(`#/cases/${record.doc_id}`);
    });
  });

  it("states the total and page number", () => {
    expect(text(root, ".case-count")).toBe(
      `${casesPage.total} judgments, page ${casesPage.page}`,
    );
  });
});

describe("renderCaseDetail", () => {
  const root = renderCaseDetail(caseDetail);

  it("shows scalar fields verbatim and joins lists with semicolons", () => {
    const dd = Array.from(
      root.querySelectorAll<HTMLElement>("dd"),
      (node) => node.textContent,
    );
    expect(dd).toEqual([
      caseDetail.case_name,
      caseDetail.date,
      caseDetail.appellant,
      caseDetail.respondent,
      caseDetail.judges.join("; "),
      caseDetail.citations.join("; "),
      caseDetail.related_provisions.join("; "),
      caseDetail.case_type,
      caseDetail.outcome_of_appellant,
      caseDetail.judgement,
      caseDetail.summary,
    ]);
  });

  it("shows the generated summary", () => {
    expect(text(root, ".generated-summary")).toBe(
      caseDetail.generated_summary,
    );
  });

  it("escapes markup in data", () => {
    const hostile = renderCaseDetail({
      ...caseDetail,
      case_name: "<img src=x onerror=alert(1)>",
    });
    expect(hostile.querySelector("img")).toBeNull();
    expect(hostile.querySelector("h2")!.textContent).toBe(
      "<img src=x onerror=alert(1)>",
    );
  });
});
