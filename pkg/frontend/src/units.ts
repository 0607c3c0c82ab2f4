// Token amounts: 18 decimals, BigInt everywhere, decimal strings on the wire.

export const DECIMALS = 18;
export const ONE_TOKEN = 10n ** 18n;

export function toDisplay(baseUnits: bigint | string): string {
  const value = typeof baseUnits === "bigint" ? baseUnits : BigInt(baseUnits);
  const whole = value / ONE_TOKEN;
  const frac = value % ONE_TOKEN;
  if (frac === 0n) return whole.toString();
  return `${whole}.${frac.toString().padStart(DECIMALS, "0")}`.replace(/0+$/, "");
}

export function parseDisplay(text: string): bigint {
  const trimmed = text.trim();
  if (trimmed.startsWith("-")) throw new Error("amounts cannot be negative");
  const [whole, frac = ""] = trimmed.split(".");
  if (frac.length > DECIMALS) throw new Error(`more than ${DECIMALS} decimal places`);
  return BigInt(whole || "0") * ONE_TOKEN + BigInt(frac.padEnd(DECIMALS, "0") || "0");
}
