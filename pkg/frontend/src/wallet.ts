// In-browser wallet: both key seeds, the DID document shape, join signatures,
// canonical transaction signing and presentation building. Secrets never
// leave this module's session object; only signatures are handed out.

import { Json, bytesToHex, canonicalJsonBytes, hexToBytes } from "./canonical.js";
import {
  b64urlOf,
  deriveEoa,
  encodeJwt,
  eoaOfSeed,
  identityPublicKey,
  randomSeed,
  signIdentity,
  signWallet,
  walletPublicKey,
} from "./crypto.js";

export interface WalletExport {
  identity_seed: string;
  wallet_seed: string;
  did?: string | null;
  vc_jwt?: string | null;
}

export class SessionWallet {
  did: string | null = null;
  vcJwt: string | null = null;

  constructor(
    private identitySeed: Uint8Array,
    private walletSeed: Uint8Array,
  ) {}

  static generate(): SessionWallet {
    return new SessionWallet(randomSeed(), randomSeed());
  }

  static fromSeeds(identitySeedHex: string, walletSeedHex: string): SessionWallet {
    return new SessionWallet(hexToBytes(identitySeedHex), hexToBytes(walletSeedHex));
  }

  static import(data: WalletExport): SessionWallet {
    const wallet = SessionWallet.fromSeeds(data.identity_seed, data.wallet_seed);
    wallet.did = data.did ?? null;
    wallet.vcJwt = data.vc_jwt ?? null;
    return wallet;
  }

  export(): WalletExport {
    // plain-seed export for the demo; treat the file like a private key
    return {
      identity_seed: bytesToHex(this.identitySeed),
      wallet_seed: bytesToHex(this.walletSeed),
      did: this.did,
      vc_jwt: this.vcJwt,
    };
  }

  get eoa(): string {
    return eoaOfSeed(this.walletSeed);
  }

  get kid(): string {
    if (!this.did) throw new Error("no DID yet");
    return `${this.did}#identity-key`;
  }

  didDocument(): Json {
    return {
      id: "",
      verificationMethod: [
        {
          id: "#identity-key",
          type: "JsonWebKey",
          publicKeyJwk: { kty: "OKP", crv: "Ed25519", x: b64urlOf(identityPublicKey(this.identitySeed)) },
        },
        {
          id: "#wallet",
          type: "EcdsaSecp256k1RecoveryMethod2020",
          blockchainAccountId: deriveEoa(walletPublicKey(this.walletSeed)),
        },
      ],
    };
  }

  joinSignatures(nonce: string): { sigmaId: string; sigmaW: string } {
    const message = new TextEncoder().encode(nonce);
    return {
      sigmaId: signIdentity(this.identitySeed, message),
      sigmaW: signWallet(this.walletSeed, message),
    };
  }

  signTransaction(contract: string, method: string, args: Record<string, Json>, value: string, nonce: number): Json {
    const tx: Record<string, Json> = {
      from: this.eoa,
      nonce,
      contract,
      method,
      args,
      value,
    };
    const signature = signWallet(this.walletSeed, canonicalJsonBytes(tx));
    return { ...tx, signature };
  }

  buildPresentation(nonce: string): string {
    if (!this.vcJwt) throw new Error("no credential to present");
    const sigmaA = signWallet(this.walletSeed, new TextEncoder().encode(nonce));
    return encodeJwt(
      { kid: this.kid, nonce },
      {
        vp: { type: "VerifiablePresentation", VerifiableCredential: [this.vcJwt] },
        walletSignature: sigmaA,
      },
      this.identitySeed,
    );
  }
}
