/** Types and loaders for the build bundle's manifest and game files. */
export function decodeSecret(game) {
    return atob(game.secretEncoded);
}
export async function fetchManifest(prefix) {
    const response = await fetch(`${prefix}manifest.json`);
    if (!response.ok)
        throw new Error(`manifest fetch failed: ${response.status}`);
    return (await response.json());
}
export async function fetchGameIndex(prefix) {
    const response = await fetch(`${prefix}games/index.json`);
    if (!response.ok)
        return [];
    return (await response.json());
}
export async function fetchGame(prefix, id) {
    const response = await fetch(`${prefix}games/${id}.json`);
    if (!response.ok)
        throw new Error(`game fetch failed: ${response.status}`);
    return (await response.json());
}
