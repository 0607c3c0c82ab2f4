// High-level marketplace flows composing the HTTP clients with the session
// wallet. Every method returns what the services confirmed, never an
// optimistic guess.

import { ConnectorApi, Denial, Offering, PlatformApi, parseServiceUrl, Receipt } from "./api.js";
import { Json } from "./canonical.js";
import { SessionWallet } from "./wallet.js";

export interface CatalogEntry extends Offering {
  description: Record<string, Json> | null;
}

export type AccessOutcome =
  | { granted: true; payload: Uint8Array }
  | { granted: false; denial: Denial };

export class Marketplace {
  constructor(
    private platform: PlatformApi,
    private connectorFor: (baseUrl: string) => ConnectorApi = (base) => new ConnectorApi(base),
  ) {}

  async createIdentity(wallet: SessionWallet): Promise<string> {
    const { did } = await this.platform.createDid(wallet.didDocument());
    wallet.did = did;
    return did;
  }

  async join(wallet: SessionWallet): Promise<{ vcId: string }> {
    if (!wallet.did) throw new Error("create an identity first");
    const challenge = await this.platform.issuerChallenge(wallet.did);
    const { sigmaId, sigmaW } = wallet.joinSignatures(challenge.nonce);
    const issued = await this.platform.issueCredential({
      did: wallet.did,
      challenge_nonce: challenge.nonce,
      sigma_id: sigmaId,
      sigma_w: sigmaW,
    });
    wallet.vcJwt = issued.vc_jwt;
    return { vcId: issued.vc_id };
  }

  async catalog(): Promise<CatalogEntry[]> {
    const info = await this.platform.info();
    const offerings = await this.platform.call<Offering[]>(info.contracts.factory, "list_offerings");
    const entries: CatalogEntry[] = [];
    for (const offering of offerings) {
      let description: Record<string, Json> | null = null;
      try {
        const raw = await this.platform.content(offering.cid);
        description = JSON.parse(new TextDecoder().decode(raw));
      } catch {
        description = null;
      }
      entries.push({ ...offering, description });
    }
    return entries;
  }

  async publish(
    wallet: SessionWallet,
    connectorBaseUrl: string,
    params: { alias: string; payload: Uint8Array; description: Record<string, Json>; supplyBase: bigint; priceBase: bigint },
  ): Promise<{ serviceContract: string; accessTokenContract: string; serviceId: string; receipt: Receipt }> {
    const connector = this.connectorFor(connectorBaseUrl);
    const payloadB64 = btoa(String.fromCharCode(...params.payload));
    const hosted = await connector.deployService(payloadB64, params.description);
    const info = await this.platform.info();
    const tx = wallet.signTransaction(
      info.contracts.factory,
      "tokenize",
      {
        alias: params.alias,
        cid: hosted.cid,
        service_url: hosted.service_url,
        at_supply: params.supplyBase.toString(),
        price: params.priceBase.toString(),
      },
      "0",
      await this.platform.nonce(wallet.eoa),
    );
    const receipt = await this.platform.submitTx(tx);
    if (receipt.status !== "ok") {
      throw new Error(`tokenization reverted: ${receipt.error}`);
    }
    const result = receipt.result as { service_contract: string; access_token_contract: string };
    return {
      serviceContract: result.service_contract,
      accessTokenContract: result.access_token_contract,
      serviceId: hosted.service_id,
      receipt,
    };
  }

  async buy(wallet: SessionWallet, serviceContract: string): Promise<Receipt> {
    const info = await this.platform.info();
    const listing = await this.platform.call<{ price: string } | null>(
      info.contracts.exchange, "get_listing", { service: serviceContract },
    );
    if (!listing) throw new Error("no listing for this service");
    const tx = wallet.signTransaction(
      info.contracts.exchange,
      "buy",
      { service: serviceContract },
      listing.price,
      await this.platform.nonce(wallet.eoa),
    );
    return this.platform.submitTx(tx);
  }

  async access(wallet: SessionWallet, serviceContract: string): Promise<AccessOutcome> {
    const info = await this.platform.info();
    const offering = await this.platform.call<Offering | null>(
      info.contracts.factory, "offering_of", { service: serviceContract },
    );
    if (!offering) throw new Error("unknown service contract");
    const { baseUrl, serviceId } = parseServiceUrl(offering.service_url);
    const connector = this.connectorFor(baseUrl);
    const challenge = await connector.challenge();
    const vp = wallet.buildPresentation(challenge.nonce);
    const outcome = await connector.requestAccess(serviceId, vp);
    if (!outcome.granted) {
      return { granted: false, denial: outcome.denial };
    }
    const payload = await connector.fetchPayload(serviceId, outcome.grantToken);
    return { granted: true, payload };
  }

  async balanceOf(eoa: string): Promise<bigint> {
    return this.platform.balance(eoa);
  }
}
