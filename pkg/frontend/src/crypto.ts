// Client-side key material and signing: secp256k1 wallet key (recoverable,
// personal-message prefixed) and Ed25519 identity key, matching the
// ecosystem's wire formats bit for bit.

import { secp256k1 } from "@noble/curves/secp256k1.js";
import { ed25519 } from "@noble/curves/ed25519.js";
import { keccak_256 } from "@noble/hashes/sha3.js";
import { sha256 } from "@noble/hashes/sha2.js";

import { Json, b64urlEncode, bytesToHex, canonicalJsonBytes, hexToBytes } from "./canonical.js";

const PERSONAL_PREFIX = "\x19Ethereum Signed Message:\n";

export function randomSeed(): Uint8Array {
  const seed = new Uint8Array(32);
  crypto.getRandomValues(seed);
  return seed;
}

export function deriveActorSeed(scenarioSeed: number, actor: string, domain: string): Uint8Array {
  // mirrors the backend's deterministic per-actor seed derivation
  return sha256(new TextEncoder().encode(`medsim:${scenarioSeed}:${actor}:${domain}`));
}

export function walletPublicKey(seed: Uint8Array): Uint8Array {
  return secp256k1.getPublicKey(seed, false).slice(1); // drop the 0x04 prefix
}

export function deriveEoa(publicKey64: Uint8Array): string {
  return "0x" + bytesToHex(keccak_256(publicKey64).slice(12));
}

export function eoaOfSeed(seed: Uint8Array): string {
  return deriveEoa(walletPublicKey(seed));
}

export function personalDigest(message: Uint8Array): Uint8Array {
  const prefix = new TextEncoder().encode(PERSONAL_PREFIX + String(message.length));
  const prefixed = new Uint8Array(prefix.length + message.length);
  prefixed.set(prefix);
  prefixed.set(message, prefix.length);
  return keccak_256(prefixed);
}

export function signWallet(seed: Uint8Array, message: Uint8Array): string {
  // deterministic nonces and low-s, so both sides produce identical bytes;
  // returns 65-byte r||s||v hex with v in {27, 28}
  const recovered = secp256k1.sign(personalDigest(message), seed, {
    prehash: false,
    format: "recovered", // [recovery, r, s]
  });
  const out = new Uint8Array(65);
  out.set(recovered.slice(1));
  out[64] = 27 + recovered[0];
  return bytesToHex(out);
}

export function identityPublicKey(seed: Uint8Array): Uint8Array {
  return ed25519.getPublicKey(seed);
}

export function signIdentity(seed: Uint8Array, message: Uint8Array): string {
  return bytesToHex(ed25519.sign(message, seed));
}

export function encodeJwt(header: Record<string, Json>, payload: Record<string, Json>, identitySeed: Uint8Array): string {
  const fullHeader: Record<string, Json> = { alg: "EdDSA", typ: "JWT", ...header };
  const signingInput =
    b64urlEncode(canonicalJsonBytes(fullHeader)) + "." + b64urlEncode(canonicalJsonBytes(payload));
  const signature = ed25519.sign(new TextEncoder().encode(signingInput), identitySeed);
  return signingInput + "." + b64urlEncode(signature);
}

export function decodeJwtPayload(token: string): Record<string, Json> {
  const parts = token.split(".");
  if (parts.length !== 3) throw new Error("not a compact JWT");
  const body = new TextDecoder().decode(
    Uint8Array.from(atob(parts[1].replace(/-/g, "+").replace(/_/g, "/") + "=".repeat((4 - (parts[1].length % 4)) % 4)), (c) =>
      c.charCodeAt(0),
    ),
  );
  return JSON.parse(body);
}

export function b64urlOf(data: Uint8Array): string {
  return b64urlEncode(data);
}

export { hexToBytes, bytesToHex };
