/** In-document text search with highlighting.
 *
 * The cleaned documents are HTML strings, so matching must never look
 * inside tags or touch attributes. The HTML is split into tag and text
 * segments; matches are counted and wrapped per text segment, which
 * also means a phrase interrupted by markup ("gold <b>units</b>") does
 * not match as one phrase. Matching is case-insensitive and
 * non-overlapping, left to right.
 */

const TAG_SPLIT = /(<[^>]*>)/;

export interface Segment {
  text: string;
  isTag: boolean;
}

export function segments(html: string): Segment[] {
  return html
    .split(TAG_SPLIT)
    .filter((part) => part.length > 0)
    .map((part) => ({ text: part, isTag: part.startsWith("<") }));
}

/** The document's visible text: everything outside tags, entities kept
 * as written so two cleaner outputs compare exactly.
 */
export function extractText(html: string): string {
  return segments(html)
    .filter((segment) => !segment.isTag)
    .map((segment) => segment.text)
    .join("");
}

export function escapeRegExp(text: string): string {
  return text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

/** Non-overlapping case-insensitive occurrence count in plain text. */
export function countMatches(text: string, query: string): number {
  if (query.length === 0) return 0;
  const pattern = new RegExp(escapeRegExp(query), "gi");
  let count = 0;
  while (pattern.exec(text) !== null) {
    count += 1;
  }
  return count;
}

export interface HighlightResult {
  html: string;
  count: number;
}

/** Wrap every text-segment occurrence of the query in <mark>. */
export function highlight(html: string, query: string): HighlightResult {
  const trimmed = query.trim();
  if (trimmed.length === 0) {
    return { html, count: 0 };
  }
  const pattern = new RegExp(escapeRegExp(trimmed), "gi");
  let count = 0;
  const out = segments(html)
    .map((segment) => {
      if (segment.isTag) return segment.text;
      return segment.text.replace(pattern, (match) => {
        count += 1;
        return `<mark>${match}</mark>`;
      });
    })
    .join("");
  return { html: out, count };
}

/** Remove highlight wrappers, restoring the original HTML. */
export function unhighlight(html: string): string {
  return html.replace(/<\/?mark>/g, "");
}
