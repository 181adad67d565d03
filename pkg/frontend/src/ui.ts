import { ApiClient, ApiError } from './api';
import { groupByUnit } from './grouping';
import type {
  DocumentInfo,
  GuidelineTree,
  SuggestionsPayload,
  Verdict,
} from './types';

export function escapeHtml(text: string): string {
  const div = document.createElement('div');
  div.textContent = text;
  return div.innerHTML;
}

interface AppState {
  documents: DocumentInfo[];
  currentDocument: string | null;
  currentMethod: string | null;
  suggestions: SuggestionsPayload | null;
  guideline: GuidelineTree | null;
  browserOpen: boolean;
  error: string | null;
  unsynced: Set<string>;
  exportText: string | null;
}

/**
 * Review pass over ranked suggestions: browse documents, accept/reject each
 * suggestion, add categories the methods missed, export the final
 * classification. Rows only change state after the server acknowledges the
 * decision; there are no optimistic updates.
 */
export class ReviewApp {
  readonly state: AppState = {
    documents: [],
    currentDocument: null,
    currentMethod: null,
    suggestions: null,
    guideline: null,
    browserOpen: false,
    error: null,
    unsynced: new Set(),
    exportText: null,
  };

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async start(): Promise<void> {
    try {
      this.state.documents = await this.api.listDocuments();
      this.state.error = null;
    } catch (err) {
      this.state.error = this.describe(err);
    }
    this.render();
  }

  async openDocument(documentId: string, method?: string): Promise<void> {
    try {
      this.state.suggestions = await this.api.suggestions(documentId, method);
      this.state.currentDocument = documentId;
      this.state.currentMethod = this.state.suggestions.method;
      this.state.error = null;
    } catch (err) {
      this.state.error = this.describe(err);
    }
    this.render();
  }

  async decide(categoryId: string, verdict: Verdict): Promise<void> {
    const documentId = this.state.currentDocument;
    if (!documentId) return;
    try {
      await this.api.postDecision(documentId, categoryId, verdict);
      this.state.unsynced.delete(categoryId);
      // re-fetch: the server's decision log is the source of truth
      this.state.suggestions = await this.api.suggestions(
        documentId,
        this.state.currentMethod ?? undefined,
      );
      this.state.error = null;
    } catch (err) {
      this.state.unsynced.add(categoryId);
      this.state.error = this.describe(err);
    }
    this.render();
  }

  async toggleBrowser(): Promise<void> {
    if (!this.state.browserOpen && !this.state.guideline) {
      try {
        this.state.guideline = await this.api.guideline();
        this.state.error = null;
      } catch (err) {
        this.state.error = this.describe(err);
        this.render();
        return;
      }
    }
    this.state.browserOpen = !this.state.browserOpen;
    this.render();
  }

  async showExport(): Promise<void> {
    try {
      const payload = await this.api.exportClassification();
      this.state.exportText = JSON.stringify(payload, null, 2);
      this.state.error = null;
    } catch (err) {
      this.state.error = this.describe(err);
    }
    this.render();
    this.downloadExport();
  }

  private downloadExport(): void {
    if (this.state.exportText === null || typeof URL.createObjectURL !== 'function') return;
    const blob = new Blob([this.state.exportText], { type: 'application/json' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'classification.json';
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) return err.message;
    return String(err);
  }

  render(): void {
    const s = this.state;
    this.root.innerHTML = `
      ${s.error ? `<div class="banner error" data-testid="error-banner">${escapeHtml(s.error)}</div>` : ''}
      <div class="layout">
        <aside class="sidebar">
          <h2>Documents</h2>
          <ul class="doc-list">${this.renderDocumentList()}</ul>
          <button class="btn" data-action="export">Export classification</button>
          ${s.exportText !== null ? `<pre class="export" data-testid="export-view">${escapeHtml(s.exportText)}</pre>` : ''}
        </aside>
        <main class="main">${this.renderMain()}</main>
      </div>
    `;
    this.wireEvents();
  }

  private renderDocumentList(): string {
    if (!this.state.documents.length) {
      return '<li class="empty">No classified documents</li>';
    }
    return this.state.documents
      .map((doc) => {
        const active = doc.document_id === this.state.currentDocument ? ' active' : '';
        const counts = Object.entries(doc.methods)
          .map(([method, n]) => `${escapeHtml(method)}: ${n}`)
          .join(', ');
        return `
          <li>
            <button class="doc-link${active}" data-action="open-doc"
                    data-doc="${escapeHtml(doc.document_id)}">
              ${escapeHtml(doc.document_id)}
            </button>
            <span class="counts">${counts}</span>
          </li>`;
      })
      .join('');
  }

  private renderMain(): string {
    const s = this.state;
    if (!s.suggestions) {
      return '<p class="hint">Select a document to review its suggestions.</p>';
    }
    const methods = s.documents.find((d) => d.document_id === s.currentDocument)?.methods ?? {};
    const methodPicker = Object.keys(methods)
      .map(
        (m) => `
          <button class="method${m === s.currentMethod ? ' active' : ''}"
                  data-action="pick-method" data-method="${escapeHtml(m)}">
            ${escapeHtml(m)}
          </button>`,
      )
      .join('');
    return `
      <header>
        <h1>${escapeHtml(s.suggestions.document_id)}</h1>
        <div class="methods">${methodPicker}</div>
      </header>
      ${this.renderSuggestions()}
      <section class="add-panel">
        <button class="btn" data-action="toggle-browser">
          ${s.browserOpen ? 'Hide guideline browser' : 'Add a category from the guideline'}
        </button>
        ${s.browserOpen ? this.renderBrowser() : ''}
      </section>
    `;
  }

  private renderSuggestions(): string {
    const entries = this.state.suggestions?.entries ?? [];
    if (!entries.length) {
      return '<p class="empty" data-testid="empty-state">No suggestions for this document.</p>';
    }
    return groupByUnit(entries)
      .map(
        (group) => `
        <section class="unit-group">
          <h3>${escapeHtml(group.ka_title)} &rsaquo; ${escapeHtml(group.ku_title)}</h3>
          <ul class="suggestions">
            ${group.rows.map((row) => this.renderRow(row)).join('')}
          </ul>
        </section>`,
      )
      .join('');
  }

  private renderRow(row: {
    category_id: string;
    text: string;
    kind: string;
    score: number;
    rank: number;
    decision: string;
  }): string {
    const unsynced = this.state.unsynced.has(row.category_id);
    return `
      <li class="suggestion ${escapeHtml(row.decision)}" data-category="${escapeHtml(row.category_id)}">
        <span class="rank">#${row.rank}</span>
        <span class="text">${escapeHtml(row.text)}</span>
        <span class="kind badge">${escapeHtml(row.kind)}</span>
        <span class="score badge" data-testid="score">${String(row.score)}</span>
        <span class="decision badge ${escapeHtml(row.decision)}">${escapeHtml(row.decision)}</span>
        ${
          unsynced
            ? `<button class="btn retry" data-action="accept" data-category="${escapeHtml(row.category_id)}">unsynced, retry</button>`
            : `
              <button class="btn accept" data-action="accept" data-category="${escapeHtml(row.category_id)}">Accept</button>
              <button class="btn reject" data-action="reject" data-category="${escapeHtml(row.category_id)}">Reject</button>`
        }
      </li>`;
  }

  private renderBrowser(): string {
    const guideline = this.state.guideline;
    if (!guideline) return '';
    return `
      <div class="browser" data-testid="guideline-browser">
        ${guideline.areas
          .map(
            (area) => `
            <details>
              <summary>${escapeHtml(area.title)}</summary>
              ${area.units
                .map(
                  (unit) => `
                  <details class="unit">
                    <summary>${escapeHtml(unit.title)}</summary>
                    <ul>
                      ${unit.items
                        .map(
                          (item) => `
                          <li>
                            ${escapeHtml(item.text)}
                            <button class="btn add" data-action="add"
                                    data-category="${escapeHtml(item.id)}">Add</button>
                          </li>`,
                        )
                        .join('')}
                    </ul>
                  </details>`,
                )
                .join('')}
            </details>`,
          )
          .join('')}
      </div>`;
  }

  private wireEvents(): void {
    this.root.querySelectorAll<HTMLElement>('[data-action]').forEach((el) => {
      const action = el.dataset.action;
      el.addEventListener('click', () => {
        if (action === 'open-doc') void this.openDocument(el.dataset.doc ?? '');
        else if (action === 'pick-method')
          void this.openDocument(this.state.currentDocument ?? '', el.dataset.method);
        else if (action === 'accept') void this.decide(el.dataset.category ?? '', 'accepted');
        else if (action === 'reject') void this.decide(el.dataset.category ?? '', 'rejected');
        else if (action === 'add') void this.decide(el.dataset.category ?? '', 'added');
        else if (action === 'toggle-browser') void this.toggleBrowser();
        else if (action === 'export') void this.showExport();
      });
    });
  }
}
