// Single-page marketplace: session management, catalog, publish, buy, access.
// All state shown is re-fetched from the services after every action.

import { ApiError, ConnectorApi, PlatformApi } from "./api.js";
import { Marketplace } from "./marketplace.js";
import { decodeJwtPayload } from "./crypto.js";
import { SessionWallet } from "./wallet.js";
import { parseDisplay } from "./units.js";
import {
  renderCatalog,
  renderDenial,
  renderGrant,
  renderLog,
  renderRevert,
  renderSession,
} from "./views.js";

interface AppState {
  platformUrl: string;
  connectorUrl: string;
  wallet: SessionWallet | null;
  vcId: string | null;
  balance: bigint | null;
  log: string[];
}

const state: AppState = {
  platformUrl: localStorage.getItem("medsim.platformUrl") ?? "http://127.0.0.1:8000",
  connectorUrl: localStorage.getItem("medsim.connectorUrl") ?? "http://127.0.0.1:8000",
  wallet: null,
  vcId: null,
  balance: null,
  log: [],
};

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function market(): Marketplace {
  return new Marketplace(new PlatformApi(state.platformUrl), (base) => new ConnectorApi(base));
}

function log(line: string): void {
  state.log.unshift(`${new Date().toISOString().slice(11, 19)}  ${line}`);
  state.log = state.log.slice(0, 60);
  $("log").innerHTML = renderLog(state.log);
}

async function refreshSession(): Promise<void> {
  let balance: bigint | null = null;
  if (state.wallet) {
    try {
      balance = await market().balanceOf(state.wallet.eoa);
    } catch {
      balance = null;
    }
  }
  state.balance = balance;
  if (state.wallet?.vcJwt && !state.vcId) {
    const payload = decodeJwtPayload(state.wallet.vcJwt);
    state.vcId = typeof payload.jti === "string" ? payload.jti : null;
  }
  $("session").innerHTML = renderSession({
    did: state.wallet?.did ?? null,
    eoa: state.wallet?.eoa ?? null,
    vcId: state.vcId,
    balance,
  });
}

async function refreshCatalog(): Promise<void> {
  try {
    const entries = await market().catalog();
    $("catalog").innerHTML = renderCatalog(entries);
  } catch (error) {
    $("catalog").innerHTML = `<p class="muted">catalog unavailable: ${String(error)}</p>`;
  }
}

function requireWallet(): SessionWallet {
  if (!state.wallet) throw new Error("no session; generate or import a keystore first");
  return state.wallet;
}

async function act(label: string, action: () => Promise<void>): Promise<void> {
  try {
    await action();
    log(`${label}: ok`);
  } catch (error) {
    if (error instanceof ApiError) {
      log(`${label}: ${error.message}`);
    } else {
      log(`${label}: ${String(error)}`);
    }
  } finally {
    await refreshSession();
    await refreshCatalog();
  }
}

function wireEvents(): void {
  $("endpoint-form").addEventListener("submit", (event) => {
    event.preventDefault();
    state.platformUrl = ($("platform-url") as HTMLInputElement).value.trim();
    state.connectorUrl = ($("connector-url") as HTMLInputElement).value.trim();
    localStorage.setItem("medsim.platformUrl", state.platformUrl);
    localStorage.setItem("medsim.connectorUrl", state.connectorUrl);
    void act("endpoints updated", async () => {});
  });

  $("generate").addEventListener("click", () => {
    state.wallet = SessionWallet.generate();
    state.vcId = null;
    void act("generated fresh keys", async () => {});
  });

  $("import").addEventListener("click", () => {
    void act("import keystore", async () => {
      const raw = ($("keystore-json") as HTMLTextAreaElement).value;
      state.wallet = SessionWallet.import(JSON.parse(raw));
      state.vcId = null;
    });
  });

  $("export").addEventListener("click", () => {
    void act("export keystore", async () => {
      const wallet = requireWallet();
      ($("keystore-json") as HTMLTextAreaElement).value = JSON.stringify(wallet.export(), null, 2);
    });
  });

  $("create-did").addEventListener("click", () => {
    void act("publish DID", async () => {
      await market().createIdentity(requireWallet());
    });
  });

  $("join").addEventListener("click", () => {
    void act("join", async () => {
      const { vcId } = await market().join(requireWallet());
      state.vcId = vcId;
    });
  });

  $("publish-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void act("publish", async () => {
      const wallet = requireWallet();
      const alias = ($("pub-alias") as HTMLInputElement).value.trim();
      const price = parseDisplay(($("pub-price") as HTMLInputElement).value);
      const supply = parseDisplay(($("pub-supply") as HTMLInputElement).value);
      const payload = new TextEncoder().encode(($("pub-payload") as HTMLTextAreaElement).value);
      const descriptionRaw = ($("pub-description") as HTMLTextAreaElement).value || "{}";
      const published = await market().publish(wallet, state.connectorUrl, {
        alias,
        payload,
        description: JSON.parse(descriptionRaw),
        supplyBase: supply,
        priceBase: price,
      });
      log(`published ${alias} at ${published.serviceContract}`);
    });
  });

  $("catalog").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const service = target.dataset.service;
    if (!service) return;
    if (target.classList.contains("buy")) {
      void act(`buy ${service.slice(0, 10)}…`, async () => {
        const receipt = await market().buy(requireWallet(), service);
        if (receipt.status !== "ok") {
          $("outcome").innerHTML = renderRevert(receipt.error ?? "unknown reason");
          throw new Error(receipt.error ?? "reverted");
        }
        $("outcome").innerHTML = `<div class="banner grant">Purchased. Receipt height ${receipt.height}.</div>`;
      });
    } else if (target.classList.contains("open")) {
      void act(`access ${service.slice(0, 10)}…`, async () => {
        const outcome = await market().access(requireWallet(), service);
        $("outcome").innerHTML = outcome.granted
          ? renderGrant(outcome.payload)
          : renderDenial(outcome.denial);
        if (!outcome.granted) {
          throw new Error(`denied at stage ${outcome.denial.stage}`);
        }
      });
    }
  });
}

function init(): void {
  ($("platform-url") as HTMLInputElement).value = state.platformUrl;
  ($("connector-url") as HTMLInputElement).value = state.connectorUrl;
  wireEvents();
  void refreshSession();
  void refreshCatalog();
}

document.addEventListener("DOMContentLoaded", init);
