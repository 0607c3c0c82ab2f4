// Typed fetch clients for the platform and connector HTTP surfaces.

import { Json } from "./canonical.js";

export interface PlatformInfo {
  contracts: Record<string, string>;
  issuer_did: string;
  native_decimals: number;
  height: number;
  now: number;
}

export interface Challenge {
  nonce: string;
  audience: string | null;
  issued_at: number;
  ttl: number;
}

export interface Offering {
  alias: string;
  cid: string;
  service_url: string;
  service_contract: string;
  access_token_contract: string;
  owner: string;
  price: string;
  at_supply: string;
}

export interface Receipt {
  status: "ok" | "reverted";
  error: string | null;
  result: Json;
  height: number | null;
  events: { emitter: string; name: string; payload: Record<string, Json>; tx_height: number }[];
}

export interface Denial {
  stage: number;
  reason: string;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function decode(response: Response): Promise<unknown> {
  const type = response.headers.get("content-type") ?? "";
  return type.startsWith("application/json") ? response.json() : response.arrayBuffer();
}

async function checked<T>(response: Response): Promise<T> {
  const body = await decode(response);
  if (!response.ok) {
    const detail =
      body && typeof body === "object" && "detail" in body ? String((body as { detail: unknown }).detail) : response.statusText;
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

export class PlatformApi {
  constructor(public baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  info(): Promise<PlatformInfo> {
    return fetch(this.url("/platform")).then((r) => checked<PlatformInfo>(r));
  }

  createDid(document: Json): Promise<{ did: string }> {
    return fetch(this.url("/dids"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ document }),
    }).then((r) => checked(r));
  }

  issuerChallenge(did: string): Promise<Challenge> {
    return fetch(this.url(`/issuer/challenge?did=${encodeURIComponent(did)}`)).then((r) => checked<Challenge>(r));
  }

  issueCredential(body: { did: string; challenge_nonce: string; sigma_id: string; sigma_w: string }): Promise<{ vc_jwt: string; vc_id: string }> {
    return fetch(this.url("/issuer/credentials"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => checked(r));
  }

  submitTx(tx: Json): Promise<Receipt> {
    return fetch(this.url("/tx"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(tx),
    }).then((r) => checked<Receipt>(r));
  }

  call<T = Json>(contract: string, method: string, args: Record<string, Json> = {}): Promise<T> {
    return fetch(this.url("/call"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ contract, method, args }),
    })
      .then((r) => checked<{ result: T }>(r))
      .then((body) => body.result);
  }

  async balance(eoa: string): Promise<bigint> {
    const body = await fetch(this.url(`/state/balance/${eoa}`)).then((r) => checked<{ balance: string }>(r));
    return BigInt(body.balance);
  }

  async nonce(eoa: string): Promise<number> {
    const body = await fetch(this.url(`/state/nonce/${eoa}`)).then((r) => checked<{ nonce: number }>(r));
    return body.nonce;
  }

  async content(cid: string): Promise<Uint8Array> {
    const response = await fetch(this.url(`/dds/${cid}`));
    if (!response.ok) throw new ApiError(response.status, "content not found");
    return new Uint8Array(await response.arrayBuffer());
  }
}

export class ConnectorApi {
  constructor(public baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  challenge(): Promise<Challenge> {
    return fetch(this.url("/connector/challenge")).then((r) => checked<Challenge>(r));
  }

  deployService(payloadB64: string, description: Record<string, Json>): Promise<{ service_id: string; cid: string; service_url: string }> {
    return fetch(this.url("/connector/services"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ payload_b64: payloadB64, description }),
    }).then((r) => checked(r));
  }

  async requestAccess(serviceId: string, vpJwt: string): Promise<{ granted: true; grantToken: string } | { granted: false; denial: Denial }> {
    const response = await fetch(this.url(`/connector/services/${serviceId}/access`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ vp: vpJwt }),
    });
    const body = (await decode(response)) as Record<string, unknown>;
    if (response.ok) {
      return { granted: true, grantToken: String(body.grant_token) };
    }
    if (response.status === 403 && "stage" in body) {
      return { granted: false, denial: { stage: Number(body.stage), reason: String(body.reason) } };
    }
    throw new ApiError(response.status, JSON.stringify(body));
  }

  async fetchPayload(serviceId: string, grantToken: string): Promise<Uint8Array> {
    const response = await fetch(this.url(`/connector/services/${serviceId}/payload`), {
      headers: { authorization: `Bearer ${grantToken}` },
    });
    if (!response.ok) throw new ApiError(response.status, "payload fetch rejected");
    return new Uint8Array(await response.arrayBuffer());
  }
}

export function parseServiceUrl(serviceUrl: string): { baseUrl: string; serviceId: string } {
  const marker = "/connector/services/";
  const index = serviceUrl.indexOf(marker);
  if (index < 0) throw new Error(`not a connector payload URL: ${serviceUrl}`);
  const serviceId = serviceUrl.slice(index + marker.length).split("/", 1)[0];
  return { baseUrl: serviceUrl.slice(0, index), serviceId };
}
