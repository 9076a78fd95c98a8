// DOM layer: renders AuthoringSession snapshots into the static shell and
// wires input events back into it. No framework; each panel re-renders from
// scratch on every state change (the DOM here is tiny).

import { WorkbenchApi } from "./api.js";
import { AuthoringSession } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function must<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

export function mountApp(root: ParentNode, api: WorkbenchApi): AuthoringSession {
  const nlInput = must<HTMLTextAreaElement>(root, "#nl-input");
  const translateBtn = must<HTMLButtonElement>(root, "#translate-btn");
  const translateBanner = must<HTMLDivElement>(root, "#translate-banner");
  const candidateList = must<HTMLOListElement>(root, "#candidates");
  const cnlInput = must<HTMLTextAreaElement>(root, "#cnl-input");
  const badge = must<HTMLSpanElement>(root, "#validation-badge");
  const hintBox = must<HTMLDivElement>(root, "#hints");
  const transpileBtn = must<HTMLButtonElement>(root, "#transpile-btn");
  const programPre = must<HTMLPreElement>(root, "#program-json");
  const downloadLink = must<HTMLAnchorElement>(root, "#download-link");
  const recordsInput = must<HTMLTextAreaElement>(root, "#records-input");
  const runBtn = must<HTMLButtonElement>(root, "#run-btn");
  const traceBody = must<HTMLTableSectionElement>(root, "#traces tbody");
  const runBanner = must<HTMLDivElement>(root, "#run-banner");
  const statsBox = must<HTMLDivElement>(root, "#stats");

  const session = new AuthoringSession(api, () => render());

  nlInput.addEventListener("input", () => session.setNl(nlInput.value));
  translateBtn.addEventListener("click", () => void session.submitNl());
  cnlInput.addEventListener("input", () => session.editCnl(cnlInput.value));
  transpileBtn.addEventListener("click", () => void session.transpile());
  recordsInput.addEventListener("input", () => session.setRecordsText(recordsInput.value));
  runBtn.addEventListener("click", () => void session.run());

  function renderCandidates(): void {
    candidateList.replaceChildren();
    session.candidates.forEach((candidate, index) => {
      const item = el("li", "candidate" + (session.selectedCandidate === index ? " selected" : ""));
      const badgeSpan = el(
        "span",
        candidate.valid ? "badge badge-valid" : "badge badge-invalid",
        candidate.valid ? "valid" : "invalid",
      );
      if (candidate.parse_error) badgeSpan.title = candidate.parse_error;
      item.append(
        badgeSpan,
        el("span", "score", candidate.score.toFixed(4)),
        el("code", "cnl-text", candidate.cnl),
      );
      item.addEventListener("click", () => session.selectCandidate(index));
      candidateList.append(item);
    });
  }

  function renderTranslateBanner(): void {
    translateBanner.replaceChildren();
    translateBanner.className = "banner-slot";
    if (session.translateError) {
      const banner = el("div", "banner banner-error");
      banner.append(el("span", undefined, `Translation failed: ${session.translateError} `));
      const retry = el("button", "retry-btn", "Retry");
      retry.addEventListener("click", () => void session.submitNl());
      banner.append(retry);
      translateBanner.append(banner);
    } else if (session.constraintExhausted) {
      translateBanner.append(
        el("div", "banner banner-warning",
          "The decoder exhausted the constraint tree; candidates are partial."),
      );
    } else if (session.translating) {
      translateBanner.append(el("div", "banner banner-info", "Translating..."));
    }
  }

  function renderValidation(): void {
    const v = session.validation;
    badge.className = "badge";
    hintBox.replaceChildren();
    if (v.kind === "valid") {
      badge.classList.add("badge-valid");
      badge.textContent = "valid";
      badge.title = v.ast.normalized;
    } else if (v.kind === "invalid") {
      badge.classList.add("badge-invalid");
      badge.textContent = "invalid";
      badge.title = v.error.message;
      if (v.error.expected.length) {
        hintBox.append(el("span", "hint-label",
          `expected at token ${v.error.position}:`));
        for (const token of v.error.expected) {
          const chip = el("button", "hint-chip", token);
          chip.addEventListener("click", () => session.insertHint(token));
          hintBox.append(chip);
        }
      }
    } else if (v.kind === "pending") {
      badge.classList.add("badge-pending");
      badge.textContent = "checking...";
    } else {
      badge.textContent = "";
    }
    transpileBtn.disabled = !session.canTranspile;
  }

  function renderProgram(): void {
    programPre.textContent = session.programJson();
    if (session.transpileError) {
      programPre.textContent = `transpile failed: ${session.transpileError}`;
    }
    if (session.program) {
      downloadLink.href = session.downloadHref();
      downloadLink.removeAttribute("hidden");
    } else {
      downloadLink.setAttribute("hidden", "hidden");
    }
    runBtn.disabled = !session.program;
  }

  function renderTraces(): void {
    runBanner.replaceChildren();
    if (session.runError) {
      runBanner.append(el("div", "banner banner-error", session.runError));
    }
    traceBody.replaceChildren();
    session.traces.forEach((row) => {
      const tr = el("tr", row.error ? "trace-error" : undefined);
      tr.append(el("td", "record-cell", JSON.stringify(row.record)));
      if (row.error) {
        const cell = el("td", undefined, "—");
        const chip = el("span", "error-chip", row.error);
        const wrap = el("td");
        wrap.append(chip);
        tr.append(cell, wrap);
      } else if (row.trace) {
        tr.append(el("td", row.trace.fired ? "fired-yes" : "fired-no",
          row.trace.fired ? "fired" : "not fired"));
        const effects = (row.trace.applied ?? [])
          .map((effect) => JSON.stringify(effect))
          .join(", ");
        tr.append(el("td", "effects-cell", effects || "—"));
      }
      traceBody.append(tr);
    });
  }

  function render(): void {
    translateBtn.disabled = !session.canSubmit || session.translating;
    if (cnlInput.value !== session.cnl) cnlInput.value = session.cnl;
    if (recordsInput.value !== session.recordsText) recordsInput.value = session.recordsText;
    renderTranslateBanner();
    renderCandidates();
    renderValidation();
    renderProgram();
    renderTraces();
  }

  void api
    .stats()
    .then((stats) => {
      statsBox.textContent =
        `corpus: ${stats.n_pairs} pairs ` +
        `(train ${stats.splits.train ?? 0} / test ${stats.splits.test ?? 0} / ` +
        `validation ${stats.splits.validation ?? 0}), trie scope ${stats.trie_scope}`;
    })
    .catch(() => {
      statsBox.textContent = "no corpus loaded";
    });

  recordsInput.value = session.recordsText;
  render();
  return session;
}
