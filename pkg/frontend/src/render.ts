// Pure HTML renderers. Every renderer returns a string; the app swaps it
// into the DOM and wires behavior through data-action attributes, so the
// UI holds no logic beyond rendering and dispatch.

import type { ConceptVersion, DimensionRow, TableResult } from "./types.js";
import { scalarText } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function formatInterval(validFrom: string, validTo: string | null): string {
  return `[${validFrom}, ${validTo ?? "open"})`;
}

function attributeRows(version: ConceptVersion): string {
  const entries = Object.entries(version.attributes);
  if (entries.length === 0) return "";
  return entries
    .map(
      ([key, value]) => `
        <tr><th>${escapeHtml(key)}</th><td>${escapeHtml(scalarText(value))}</td></tr>`
    )
    .join("");
}

export function renderMethodMenu(id: string, methods: string[]): string {
  const buttons = methods
    .map(
      (method) => `
        <button class="method" data-action="method" data-id="${escapeHtml(id)}"
                data-method="${escapeHtml(method)}">${escapeHtml(method)}</button>`
    )
    .join("");
  return `<nav class="method-menu" data-menu-for="${escapeHtml(id)}">${buttons}</nav>`;
}

export function renderConceptCard(version: ConceptVersion, methods: string[]): string {
  return `
    <article class="concept-card" data-concept="${escapeHtml(version.logical_id)}"
             data-kind="${escapeHtml(version.kind)}">
      <header>
        <span class="kind-badge">${escapeHtml(version.kind)}</span>
        <h2>${escapeHtml(version.name)}</h2>
        <code>#${escapeHtml(version.logical_id)} v${version.version_no}</code>
        <span class="interval">${formatInterval(version.valid_from, version.valid_to)}</span>
      </header>
      <p class="description">${escapeHtml(version.description)}</p>
      <table class="attributes">${attributeRows(version)}</table>
      ${renderMethodMenu(version.logical_id, methods)}
      <footer class="card-actions">
        ${version.kind === "Goal" ? `
          <button data-action="evaluation-form" data-goal="${escapeHtml(version.logical_id)}">
            record evaluation</button>` : ""}
        ${version.kind === "Evaluation" ? `
          <button data-action="action-form" data-evaluation="${escapeHtml(version.logical_id)}">
            record action</button>` : ""}
        ${version.kind === "Measure" ? `
          <button data-action="data-panel" data-measure="${escapeHtml(version.logical_id)}">
            open data panel</button>` : ""}
      </footer>
    </article>`;
}

export function renderConceptRefs(ids: string[], heading: string): string {
  if (ids.length === 0) {
    return `<section class="result-set empty"><h3>${escapeHtml(heading)}</h3>
      <p class="empty-state">no results in the selected time frame</p></section>`;
  }
  const chips = ids
    .map(
      (id) => `
        <button class="concept-ref" data-action="open" data-id="${escapeHtml(id)}">
          #${escapeHtml(id)}</button>`
    )
    .join("");
  return `<section class="result-set"><h3>${escapeHtml(heading)}</h3>${chips}</section>`;
}

export function renderConceptList(items: ConceptVersion[], heading: string): string {
  if (items.length === 0) {
    return `<section class="result-set empty"><h3>${escapeHtml(heading)}</h3>
      <p class="empty-state">no matching concepts</p></section>`;
  }
  const rows = items
    .map(
      (v) => `
        <li>
          <button class="concept-ref" data-action="open" data-id="${escapeHtml(v.logical_id)}">
            ${escapeHtml(v.name)}</button>
          <span class="kind-badge">${escapeHtml(v.kind)}</span>
          <span class="interval">${formatInterval(v.valid_from, v.valid_to)}</span>
        </li>`
    )
    .join("");
  return `<section class="result-set"><h3>${escapeHtml(heading)}</h3><ul>${rows}</ul></section>`;
}

function changedFields(previous: ConceptVersion, current: ConceptVersion): string[] {
  const changed: string[] = [];
  if (previous.name !== current.name) changed.push("name");
  if (previous.description !== current.description) changed.push("description");
  const keys = new Set([
    ...Object.keys(previous.attributes),
    ...Object.keys(current.attributes),
  ]);
  for (const key of keys) {
    if (scalarText(previous.attributes[key]) !== scalarText(current.attributes[key])) {
      changed.push(`attributes.${key}`);
    }
  }
  return changed;
}

const DAY = 86_400_000;

export function renderHistoryTimeline(versions: ConceptVersion[]): string {
  if (versions.length === 0) return `<p class="empty-state">no history</p>`;
  const starts = versions.map((v) => Date.parse(v.valid_from));
  const ends = versions.map((v) =>
    v.valid_to === null ? NaN : Date.parse(v.valid_to)
  );
  const minDate = Math.min(...starts);
  const maxKnown = Math.max(...starts, ...ends.filter((e) => !Number.isNaN(e)));
  const maxDate = maxKnown + Math.max((maxKnown - minDate) * 0.1, 30 * DAY);
  const span = maxDate - minDate;
  const bars = versions
    .map((v, i) => {
      const x = ((starts[i] - minDate) / span) * 100;
      const end = Number.isNaN(ends[i]) ? maxDate : ends[i];
      const width = Math.max(((end - starts[i]) / span) * 100, 0.5);
      const diffs = i === 0 ? [] : changedFields(versions[i - 1], v);
      const diffText = diffs.length
        ? `<tspan class="diff">Δ ${escapeHtml(diffs.join(", "))}</tspan>`
        : "";
      const y = 12 + i * 26;
      return `
        <g class="version-bar${diffs.length ? " changed" : ""}" data-version="${v.version_no}">
          <rect x="${x.toFixed(2)}%" y="${y}" width="${width.toFixed(2)}%" height="16"
                rx="3" class="${v.valid_to === null ? "open-tail" : "closed"}"></rect>
          <text x="${x.toFixed(2)}%" y="${y - 3}">v${v.version_no}
            ${formatInterval(v.valid_from, v.valid_to)} ${diffText}</text>
        </g>`;
    })
    .join("");
  const height = 20 + versions.length * 26;
  return `
    <figure class="history-timeline">
      <svg viewBox="0 0 100 ${height}" width="100%" height="${height}"
           preserveAspectRatio="none">${bars}</svg>
    </figure>`;
}

export interface TableOptions {
  // column whose values are dimension-row keys, enabling the
  // data-to-metadata hop on each row
  keyColumn?: { column: string; dimension: string };
}

export function renderTable(table: TableResult, options: TableOptions = {}): string {
  const keyIndex =
    options.keyColumn === undefined
      ? -1
      : table.columns.indexOf(options.keyColumn.column);
  const head = table.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const metaHead = keyIndex >= 0 ? "<th></th>" : "";
  const body = table.rows
    .map((row) => {
      const cells = row
        .map((value) => `<td>${escapeHtml(value === null ? "" : String(value))}</td>`)
        .join("");
      let meta = "";
      if (keyIndex >= 0 && options.keyColumn) {
        const key = String(row[keyIndex]);
        meta = `<td><button data-action="row-metadata"
          data-dimension="${escapeHtml(options.keyColumn.dimension)}"
          data-key="${escapeHtml(key)}">view metadata</button></td>`;
      }
      return `<tr>${cells}${meta}</tr>`;
    })
    .join("");
  return `
    <table class="data-table">
      <thead><tr>${head}${metaHead}</tr></thead>
      <tbody>${body}</tbody>
    </table>`;
}

export interface SeriesPoint {
  label: string;
  value: number;
}

export function renderLineChart(points: SeriesPoint[], title: string): string {
  if (points.length === 0) return `<p class="empty-state">no data points</p>`;
  const values = points.map((p) => p.value);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const coords = points.map((p, i) => {
    const x = points.length === 1 ? 50 : (i / (points.length - 1)) * 96 + 2;
    const y = 6 + (1 - (p.value - lo) / span) * 60;
    return { x, y };
  });
  const polyline = coords.map((c) => `${c.x.toFixed(2)},${c.y.toFixed(2)}`).join(" ");
  const dots = coords
    .map(
      (c, i) => `
        <circle cx="${c.x.toFixed(2)}" cy="${c.y.toFixed(2)}" r="1.2"
                data-point="${escapeHtml(points[i].label)}">
          <title>${escapeHtml(points[i].label)}: ${points[i].value}</title>
        </circle>`
    )
    .join("");
  const labels = `
    <text x="2" y="78" class="axis">${escapeHtml(points[0].label)}</text>
    <text x="98" y="78" class="axis" text-anchor="end">
      ${escapeHtml(points[points.length - 1].label)}</text>
    <text x="2" y="6" class="axis">${hi}</text>
    <text x="2" y="70" class="axis">${lo}</text>`;
  return `
    <figure class="line-chart">
      <figcaption>${escapeHtml(title)}</figcaption>
      <svg viewBox="0 0 100 80" width="100%" height="220" preserveAspectRatio="none">
        <polyline points="${polyline}" fill="none"></polyline>
        ${dots}${labels}
      </svg>
    </figure>`;
}

export function renderDimensionRows(dimension: string, rows: DimensionRow[]): string {
  if (rows.length === 0) {
    return `<p class="empty-state">no rows in ${escapeHtml(dimension)} at this date</p>`;
  }
  const attrNames = Object.keys(rows[0].attrs);
  const head = attrNames.map((a) => `<th>${escapeHtml(a)}</th>`).join("");
  const body = rows
    .map((row) => {
      const cells = attrNames
        .map((a) => `<td>${escapeHtml(scalarText(row.attrs[a]))}</td>`)
        .join("");
      return `<tr>
        ${cells}
        <td><span class="interval">${formatInterval(row.valid_from, row.valid_to)}</span></td>
        <td><button data-action="row-metadata" data-dimension="${escapeHtml(dimension)}"
                    data-key="${escapeHtml(row.key)}">view metadata</button></td>
      </tr>`;
    })
    .join("");
  return `
    <table class="data-table dimension-rows">
      <thead><tr>${head}<th>validity</th><th></th></tr></thead>
      <tbody>${body}</tbody>
    </table>`;
}

export function renderErrorBox(message: string): string {
  return `<div class="error-box">${escapeHtml(message)}</div>`;
}
