// Workbench bootstrap: hash-routed state, canvas scatter, reading pane,
// and the keyboard-first coding panel, all talking to the service API.

import { ApiClient, ApiError } from "./api.js";
import { CodingController } from "./coding.js";
import { OfflineQueue } from "./offline.js";
import { documentHtml, errorHtml, imageHtml } from "./reading.js";
import {
  buildDrawList,
  fitViewport,
  hitTest,
  pan,
  render,
  zoom,
  type Viewport,
} from "./scatter.js";
import {
  decodeStateFromHash,
  encodeStateToHash,
  pruneSelection,
  toggleSelection,
  type WorkbenchState,
} from "./state.js";
import type { LayoutPoint, SampleId } from "./types.js";

const BASE_URL = (window as unknown as { DATASCOPE_BASE_URL?: string }).DATASCOPE_BASE_URL ?? "";

class Workbench {
  private readonly api = new ApiClient(BASE_URL);
  private readonly offline = new OfflineQueue();
  private state: WorkbenchState = decodeStateFromHash(location.hash);
  private points: LayoutPoint[] = [];
  private view: Viewport | null = null;
  private coding: CodingController | null = null;
  private activeSample: SampleId | null = null;

  private readonly canvas = document.getElementById("scatter") as HTMLCanvasElement;
  private readonly readingPane = document.getElementById("reading") as HTMLElement;
  private readonly codingPane = document.getElementById("coding") as HTMLElement;
  private readonly toolbar = document.getElementById("toolbar") as HTMLElement;

  async start(): Promise<void> {
    window.addEventListener("hashchange", () => {
      this.state = decodeStateFromHash(location.hash);
      void this.reload();
    });
    window.addEventListener("online", () => void this.offline.flush());
    this.bindCanvas();
    this.bindKeys();
    await this.buildToolbar();
    await this.reload();
  }

  private syncHash(): void {
    const hash = encodeStateToHash(this.state);
    if (hash !== location.hash) history.replaceState(null, "", hash || "#");
  }

  private async buildToolbar(): Promise<void> {
    const [datasets, layouts] = await Promise.all([
      this.api.listDatasets(),
      this.api.listLayouts(),
    ]);
    const datasetOptions = datasets
      .map((d) => `<option value="${d.id}">${d.id}</option>`)
      .join("");
    const layoutOptions = layouts
      .map((l) => `<option value="${l.id}">${l.id} (${l.points})</option>`)
      .join("");
    this.toolbar.innerHTML =
      `<select id="dataset-select"><option value="">dataset</option>${datasetOptions}</select>` +
      `<select id="layout-select"><option value="">layout</option>${layoutOptions}</select>` +
      `<label><input type="checkbox" id="color-by-code"> color by code</label>` +
      `<span id="offline-indicator"></span>`;
    const datasetSelect = document.getElementById("dataset-select") as HTMLSelectElement;
    const layoutSelect = document.getElementById("layout-select") as HTMLSelectElement;
    const colorToggle = document.getElementById("color-by-code") as HTMLInputElement;
    if (this.state.dataset) datasetSelect.value = this.state.dataset;
    if (this.state.layout) layoutSelect.value = this.state.layout;
    colorToggle.checked = this.state.colorBy === "code";
    datasetSelect.onchange = () => {
      this.state = { ...this.state, dataset: datasetSelect.value || null };
      this.syncHash();
      void this.reload();
    };
    layoutSelect.onchange = () => {
      this.state = { ...this.state, layout: layoutSelect.value || null, selection: [] };
      this.syncHash();
      void this.reload();
    };
    colorToggle.onchange = () => {
      this.state = { ...this.state, colorBy: colorToggle.checked ? "code" : "label" };
      this.syncHash();
      this.draw();
    };
  }

  private async reload(): Promise<void> {
    if (this.state.layout) {
      try {
        this.points = await this.api.layoutPoints(this.state.layout, {
          session: this.state.session ?? undefined,
        });
        this.state = pruneSelection(this.state, new Set(this.points.map((p) => p.id)));
        this.view = fitViewport(this.points, this.canvas.width, this.canvas.height);
      } catch (error) {
        this.points = [];
        this.readingPane.innerHTML = errorHtml(
          error instanceof ApiError ? error.message : "layout failed to load",
        );
      }
    }
    if (this.state.session) {
      this.coding = new CodingController(this.api, this.state.session);
      try {
        await this.coding.refresh();
      } catch {
        this.coding = null;
      }
    }
    this.draw();
    this.renderCodingPanel();
  }

  private draw(): void {
    if (!this.view) return;
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const commands = buildDrawList(this.points, this.view, {
      colorBy: this.state.colorBy,
      labelFilter: new Set(this.state.labelFilter),
      selection: new Set(this.state.selection),
    });
    render(ctx, this.view, commands);
  }

  private bindCanvas(): void {
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    let moved = false;
    this.canvas.addEventListener("mousedown", (event) => {
      dragging = true;
      moved = false;
      lastX = event.offsetX;
      lastY = event.offsetY;
    });
    this.canvas.addEventListener("mousemove", (event) => {
      if (!dragging || !this.view) return;
      const dx = event.offsetX - lastX;
      const dy = event.offsetY - lastY;
      if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
      this.view = pan(this.view, dx, dy);
      lastX = event.offsetX;
      lastY = event.offsetY;
      this.draw();
    });
    window.addEventListener("mouseup", (event) => {
      if (!dragging) return;
      dragging = false;
      if (moved || !this.view) return;
      const rect = this.canvas.getBoundingClientRect();
      const hit = hitTest(this.points, this.view, event.clientX - rect.left, event.clientY - rect.top);
      if (hit) {
        this.state = toggleSelection(this.state, hit.id);
        this.syncHash();
        this.activeSample = hit.id;
        void this.showSample(hit.id);
        this.draw();
      }
    });
    this.canvas.addEventListener("wheel", (event) => {
      if (!this.view) return;
      event.preventDefault();
      const factor = event.deltaY < 0 ? 1.15 : 1 / 1.15;
      this.view = zoom(this.view, factor, event.offsetX, event.offsetY);
      this.draw();
    });
  }

  private async showSample(id: SampleId): Promise<void> {
    const dataset = this.state.dataset ?? "20ng";
    try {
      if (dataset.startsWith("mnist")) {
        this.readingPane.innerHTML = imageHtml(dataset, Number(id), this.api.imageUrl("mnist", Number(id)));
      } else {
        const doc = await this.api.getDocument("20ng", id);
        this.readingPane.innerHTML = documentHtml(doc);
      }
    } catch (error) {
      this.readingPane.innerHTML = errorHtml(
        error instanceof ApiError ? `${error.code}: ${error.message}` : "failed to load sample",
      );
    }
  }

  private renderCodingPanel(): void {
    if (!this.coding) {
      this.codingPane.innerHTML = "<p>no active session</p>";
      return;
    }
    const session = this.coding.current;
    const codes = session.codebook
      .map(
        (code, i) =>
          `<li><kbd>${i + 1}</kbd> ${code.name}` +
          `${code.matches_category ? " *" : ""} (${session.summary.counts[code.name] ?? 0})</li>`,
      )
      .join("");
    const saturation = session.saturation.saturated
      ? `<span class="saturated">saturated</span>`
      : `${session.saturation.new_codes_in_window} new codes in window`;
    const exhausted = this.coding.queueExhausted();
    this.codingPane.innerHTML =
      `<div class="session-meta">${session.id} &middot; ${session.label} &middot; ${saturation}</div>` +
      `<ol class="codebook">${codes}</ol>` +
      `<div class="queue-preview">next: ${this.coding.queuePreview().join(", ") || "(exhausted)"}</div>` +
      `<button id="next-sample" ${exhausted ? "disabled" : ""}>next sample</button>` +
      `<input id="new-code" placeholder="new code name">`;
    const nextButton = document.getElementById("next-sample") as HTMLButtonElement;
    nextButton.onclick = () => void this.advanceQueue();
    const newCode = document.getElementById("new-code") as HTMLInputElement;
    newCode.onkeydown = (event) => {
      if (event.key === "Enter" && newCode.value.trim()) {
        void this.assignActive(newCode.value.trim(), true);
        newCode.value = "";
      }
      event.stopPropagation();
    };
  }

  private async advanceQueue(): Promise<void> {
    if (!this.coding) return;
    const sample = await this.coding.nextSample();
    if (sample !== null) {
      this.activeSample = sample;
      this.state = { ...this.state, queuePreview: this.coding.queuePreview() };
      await this.showSample(sample);
    }
    this.renderCodingPanel();
  }

  private async assignActive(code: string, create = false): Promise<void> {
    if (!this.coding || this.activeSample === null) return;
    const coding = this.coding;
    const sample = this.activeSample;
    const indicator = document.getElementById("offline-indicator");
    await this.offline.submit(
      {
        key: `assign:${sample}:${code}`,
        run: () => coding.assign(sample, code, { create }),
      },
      (error) => !(error instanceof ApiError),
    );
    if (indicator) {
      indicator.textContent = this.offline.length ? `${this.offline.length} queued offline` : "";
    }
    this.points = await this.api.layoutPoints(this.state.layout ?? "", {
      session: this.state.session ?? undefined,
    });
    this.draw();
    this.renderCodingPanel();
  }

  private bindKeys(): void {
    window.addEventListener("keydown", (event) => {
      if (!this.coding) return;
      if (event.target instanceof HTMLInputElement) return;
      if (event.key === "n") {
        void this.advanceQueue();
        return;
      }
      const code = this.coding.codeForKey(event.key);
      if (code) void this.assignActive(code);
    });
  }
}

void new Workbench().start();
