/** Types and loaders for the build bundle's manifest and game files. */

export interface ManifestEntry {
  codeDigest: string;
  label: string;
  readOnly: boolean;
  alwaysEditable: boolean;
  output?: string;
}

export type Manifest = Record<string, ManifestEntry>;

export interface GameDeclaration {
  name: string;
  sort: string;
}

export interface EncodedGame {
  id: string;
  title: string;
  description: string;
  declarations: GameDeclaration[];
  secretEncoded: string;
  maxRows: number;
}

export function decodeSecret(game: EncodedGame): string {
  return atob(game.secretEncoded);
}

export async function fetchManifest(prefix: string): Promise<Manifest> {
  const response = await fetch(`${prefix}manifest.json`);
  if (!response.ok) throw new Error(`manifest fetch failed: ${response.status}`);
  return (await response.json()) as Manifest;
}

export async function fetchGameIndex(prefix: string): Promise<{ id: string; title: string }[]> {
  const response = await fetch(`${prefix}games/index.json`);
  if (!response.ok) return [];
  return (await response.json()) as { id: string; title: string }[];
}

export async function fetchGame(prefix: string, id: string): Promise<EncodedGame> {
  const response = await fetch(`${prefix}games/${id}.json`);
  if (!response.ok) throw new Error(`game fetch failed: ${response.status}`);
  return (await response.json()) as EncodedGame;
}
