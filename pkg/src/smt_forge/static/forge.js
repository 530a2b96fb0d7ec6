/** Bundle entry point: hydrate interactive blocks and game editors.
 *
 * Loaded as a module from every generated page. The page sets
 * window.__FORGE_PREFIX__ to the relative path back to the bundle
 * root, which scopes all (static-only) fetches.
 */
import { fetchManifest } from "./manifest.js";
import { hydrateBlocks, hydrateGames } from "./hydrate.js";
async function start() {
    const prefix = window.__FORGE_PREFIX__ ?? "";
    try {
        const manifest = await fetchManifest(prefix);
        hydrateBlocks(manifest);
    }
    catch (err) {
        console.warn("block hydration skipped:", err);
    }
    try {
        await hydrateGames(prefix);
    }
    catch (err) {
        console.warn("game hydration skipped:", err);
    }
}
if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", () => void start());
}
else {
    void start();
}
