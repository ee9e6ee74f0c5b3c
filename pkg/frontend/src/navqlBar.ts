// Free-text NavQL input. Parse failures come back with a byte offset and an
// expected-token set; the bar re-renders the query with the failure point
// highlighted.

import { escapeHtml } from "./render.js";

const encoder = new TextEncoder();

// The service reports offsets in UTF-8 bytes; DOM strings are UTF-16.
export function byteOffsetToCharIndex(text: string, byteOffset: number): number {
  let bytes = 0;
  let index = 0;
  for (const ch of text) {
    if (bytes >= byteOffset) break;
    bytes += encoder.encode(ch).length;
    index += ch.length;
  }
  return index;
}

export function renderParseError(
  text: string,
  byteOffset: number,
  expected: string[]
): string {
  const at = byteOffsetToCharIndex(text, byteOffset);
  const before = escapeHtml(text.slice(0, at));
  const bad = escapeHtml(text.slice(at, at + 1) || " ");
  const after = escapeHtml(text.slice(at + 1));
  const expectation = expected.length
    ? `expected ${expected.map(escapeHtml).join(" or ")}`
    : "invalid syntax";
  return `
    <div class="parse-error">
      <pre class="query-echo">${before}<mark data-offset="${byteOffset}">${bad}</mark>${after}</pre>
      <p class="expectation">parse error at byte ${byteOffset}: ${expectation}</p>
    </div>`;
}
