// Pure render functions: state in, HTML string out. The app re-renders these
// regions from confirmed service responses only.

import { CatalogEntry } from "./marketplace.js";
import { Denial } from "./api.js";
import { toDisplay } from "./units.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderSession(state: { did: string | null; eoa: string | null; vcId: string | null; balance: bigint | null }): string {
  if (!state.eoa) {
    return `<p class="muted">No session. Generate or import a keystore to begin.</p>`;
  }
  const rows = [
    `<dt>Account</dt><dd><code>${escapeHtml(state.eoa)}</code></dd>`,
    `<dt>DID</dt><dd>${state.did ? `<code>${escapeHtml(state.did)}</code>` : '<em>not published</em>'}</dd>`,
    `<dt>Credential</dt><dd>${state.vcId ? `<code>${escapeHtml(state.vcId)}</code>` : "<em>not joined</em>"}</dd>`,
    `<dt>Balance</dt><dd>${state.balance !== null ? escapeHtml(toDisplay(state.balance)) + " tokens" : "—"}</dd>`,
  ];
  return `<dl class="session">${rows.join("")}</dl>`;
}

export function renderBalance(balance: bigint): string {
  return `<span class="balance">${escapeHtml(toDisplay(balance))} tokens</span>`;
}

export function renderCatalog(entries: CatalogEntry[]): string {
  if (entries.length === 0) {
    return `<p class="muted">No offerings yet.</p>`;
  }
  const rows = entries.map((entry) => {
    const name = entry.description && typeof entry.description.name === "string" ? entry.description.name : "";
    const blurb = entry.description && typeof entry.description.description === "string" ? entry.description.description : "";
    return `
      <tr data-service="${escapeHtml(entry.service_contract)}">
        <td><strong>${escapeHtml(entry.alias)}</strong>${name && name !== entry.alias ? `<br><small>${escapeHtml(name)}</small>` : ""}</td>
        <td>${escapeHtml(toDisplay(BigInt(entry.price)))}</td>
        <td><small>${escapeHtml(blurb)}</small></td>
        <td><code class="addr">${escapeHtml(entry.service_contract)}</code></td>
        <td><code class="addr">${escapeHtml(entry.owner)}</code></td>
        <td>
          <button class="buy" data-service="${escapeHtml(entry.service_contract)}">buy</button>
          <button class="open" data-service="${escapeHtml(entry.service_contract)}">access</button>
        </td>
      </tr>`;
  });
  return `
    <table class="catalog">
      <thead><tr><th>Service</th><th>Price</th><th>About</th><th>Contract</th><th>Provider</th><th></th></tr></thead>
      <tbody>${rows.join("")}</tbody>
    </table>`;
}

export function renderDenial(denial: Denial): string {
  return `<div class="banner denial">Access denied at stage ${denial.stage}: ${escapeHtml(denial.reason)}</div>`;
}

export function renderGrant(payload: Uint8Array): string {
  let text: string;
  try {
    text = new TextDecoder("utf-8", { fatal: true }).decode(payload);
  } catch {
    text = `(binary payload, ${payload.length} bytes)`;
  }
  return `<div class="banner grant">Access granted.</div><pre class="payload">${escapeHtml(text)}</pre>`;
}

export function renderRevert(reason: string): string {
  return `<div class="banner denial">Transaction reverted: ${escapeHtml(reason)}</div>`;
}

export function renderLog(lines: string[]): string {
  return lines.map((line) => `<div class="logline">${escapeHtml(line)}</div>`).join("");
}
