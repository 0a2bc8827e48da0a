// Reading pane: documents render with quote lines visually distinguished;
// MNIST samples render as magnified pixel grids. Pure HTML construction,
// so it is testable as strings.

import type { DocumentView } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function documentHtml(doc: DocumentView): string {
  const headers = doc.headers
    .map(
      ([name, value]) =>
        `<div class="header"><span class="header-name">${escapeHtml(name)}:</span> ${escapeHtml(value)}</div>`,
    )
    .join("");
  const body = doc.body
    .map((line, i) => {
      const quoted = doc.quote_flags[i];
      const cls = quoted ? "line quote" : "line";
      return `<div class="${cls}">${escapeHtml(line) || "&nbsp;"}</div>`;
    })
    .join("");
  return (
    `<article class="document" data-id="${doc.id}">` +
    `<div class="doc-meta">#${doc.id} &middot; ${escapeHtml(doc.label)}</div>` +
    `<section class="headers">${headers}</section>` +
    `<section class="body">${body}</section>` +
    `</article>`
  );
}

export function imageHtml(dataset: string, index: number, imageUrl: string): string {
  return (
    `<figure class="sample-image" data-id="${index}">` +
    `<img src="${imageUrl}" alt="sample ${index}" width="224" height="224" ` +
    `style="image-rendering: pixelated;">` +
    `<figcaption>${escapeHtml(dataset)} sample ${index}</figcaption>` +
    `</figure>`
  );
}

export function errorHtml(message: string): string {
  return `<div class="inline-error">${escapeHtml(message)}</div>`;
}
