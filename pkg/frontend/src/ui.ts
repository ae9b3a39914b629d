import type { ApiClient } from "./api.js";
import { SessionStore, type SessionState } from "./session.js";
import type { ConceptMenuItem } from "./types.js";

/** DOM layer: renders the three panels off the session state and forwards
 * clicks back into the store. All ranking data comes from the service. */

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

function formatScore(value: number): string {
  return value.toPrecision(4);
}

export class ExplorerView {
  private menuFor: string | null = null;
  private menuItems: ConceptMenuItem[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly store: SessionStore,
    private readonly client: ApiClient,
  ) {
    store.subscribe((state) => this.render(state));
  }

  private async openConceptMenu(entity: string): Promise<void> {
    try {
      const response = await this.client.rollups(entity);
      this.menuFor = entity;
      this.menuItems = response.concepts;
    } catch (error) {
      this.menuFor = null;
      this.menuItems = [];
      this.store.dismissBanner();
    }
    this.render(this.store.state);
  }

  private render(state: SessionState): void {
    this.root.replaceChildren(
      this.renderBanner(state),
      this.renderOpener(),
      this.renderDocument(state),
      this.renderQueryBuilder(state),
      this.renderResults(state),
      this.renderSubtopics(state),
    );
  }

  private renderBanner(state: SessionState): HTMLElement {
    const banner = el("div", "banner");
    if (!state.banner) {
      banner.hidden = true;
      return banner;
    }
    banner.append(el("span", undefined, state.banner));
    const dismiss = el("button", "dismiss", "dismiss");
    dismiss.onclick = () => this.store.dismissBanner();
    banner.append(dismiss);
    return banner;
  }

  private renderOpener(): HTMLElement {
    const bar = el("div", "opener");
    const input = el("input");
    input.placeholder = "document id (e.g. d0000)";
    input.id = "doc-id-input";
    const open = el("button", undefined, "open document");
    open.onclick = () => {
      if (input.value.trim()) void this.store.openDocument(input.value.trim());
    };
    bar.append(input, open);
    return bar;
  }

  private renderDocument(state: SessionState): HTMLElement {
    const panel = el("section", "panel document-panel");
    panel.append(el("h2", undefined, "document inspector"));
    if (!state.document) {
      panel.append(el("p", "hint", "open a document to see its entities"));
      return panel;
    }
    panel.append(el("h3", undefined, `${state.document.id}: ${state.document.title}`));
    if (state.document.body) panel.append(el("p", "body", state.document.body));
    const chips = el("div", "chips");
    for (const mention of state.document.mentions) {
      const chip = el("button", "chip entity-chip", `${mention.entity} ×${mention.count}`);
      chip.onclick = () => void this.openConceptMenu(mention.entity);
      chips.append(chip);
      if (this.menuFor === mention.entity) {
        const menu = el("div", "concept-menu");
        for (const item of this.menuItems) {
          const row = el("button", "menu-row");
          row.append(el("span", undefined, item.concept));
          row.append(
            el("span", "meta", `${item.instance_count} instances`),
          );
          row.onclick = () => {
            this.menuFor = null;
            this.store.addConcept(item.concept);
          };
          menu.append(row);
        }
        chips.append(menu);
      }
    }
    panel.append(chips);
    return panel;
  }

  private renderQueryBuilder(state: SessionState): HTMLElement {
    const panel = el("section", "panel query-panel");
    panel.append(el("h2", undefined, "concept pattern query"));
    const chips = el("div", "chips");
    for (const concept of state.query) {
      const chip = el("button", "chip concept-chip", `${concept} ✕`);
      chip.onclick = () => this.store.removeConcept(concept);
      chips.append(chip);
    }
    panel.append(chips);
    const controls = el("div", "controls");
    const run = el("button", "run", "run query");
    run.disabled = !this.store.canRun() || state.pending > 0;
    run.onclick = () => void this.store.runQuery();
    const undo = el("button", "undo", "undo");
    undo.disabled = !this.store.canUndo() || state.pending > 0;
    undo.onclick = () => void this.store.undo();
    controls.append(run, undo);
    panel.append(controls);
    return panel;
  }

  private renderResults(state: SessionState): HTMLElement {
    const panel = el("section", "panel results-panel");
    panel.append(el("h2", undefined, "matched documents"));
    if (!state.results) {
      panel.append(el("p", "hint", "run a query to fetch ranked documents"));
      return panel;
    }
    panel.append(
      el("p", "match-count", `${state.results.match_count} documents match`),
    );
    for (const warning of state.results.warnings) {
      panel.append(el("p", "warning", warning));
    }
    const list = el("ol", "results");
    for (const result of state.results.results) {
      const item = el("li", "result");
      item.append(
        el("div", "result-title", `${result.document} · ${result.title ?? ""}`),
        el("div", "rel", `rel ${formatScore(result.rel)}`),
      );
      const explanation = el("div", "explanation");
      for (const [concept, match] of Object.entries(result.per_concept)) {
        const block = el("div", "concept-match");
        block.append(el("span", "concept-name", concept));
        block.append(el("span", "cdr", formatScore(match.cdr)));
        for (const entity of match.matched_entities) {
          const mark = el("span", "chip matched-entity", entity);
          if (entity === match.pivot) mark.classList.add("pivot");
          block.append(mark);
        }
        explanation.append(block);
      }
      item.append(explanation);
      list.append(item);
    }
    panel.append(list);
    return panel;
  }

  private renderSubtopics(state: SessionState): HTMLElement {
    const panel = el("section", "panel subtopics-panel");
    panel.append(el("h2", undefined, "drill-down suggestions"));
    if (!state.suggestions) {
      panel.append(el("p", "hint", "suggestions appear after a query runs"));
      return panel;
    }
    const maxCoverage = Math.max(
      1e-12,
      ...state.suggestions.suggestions.map((s) => s.coverage),
    );
    const maxSpecificity = Math.max(
      1e-12,
      ...state.suggestions.suggestions.map((s) => s.specificity),
    );
    const maxDiversity = Math.max(
      1e-12,
      ...state.suggestions.suggestions.map((s) => s.diversity),
    );
    for (const suggestion of state.suggestions.suggestions) {
      const row = el("button", "suggestion");
      row.append(
        el("span", "concept-name", suggestion.concept),
        this.bar("coverage", suggestion.coverage, maxCoverage),
        this.bar("specificity", suggestion.specificity, maxSpecificity),
        this.bar("diversity", suggestion.diversity, maxDiversity),
        el("span", "meta", `${suggestion.support_docs} docs, sbr ${formatScore(suggestion.sbr)}`),
      );
      row.onclick = () => void this.store.drillDown(suggestion.concept);
      panel.append(row);
    }
    return panel;
  }

  private bar(label: string, value: number, max: number): HTMLElement {
    const wrap = el("span", `bar-wrap bar-${label}`);
    wrap.title = `${label} ${formatScore(value)}`;
    const bar = el("span", "bar");
    bar.style.width = `${Math.max(2, Math.round((value / max) * 60))}px`;
    wrap.append(bar);
    return wrap;
  }
}
