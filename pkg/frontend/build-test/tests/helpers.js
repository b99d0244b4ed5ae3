/** Shared test plumbing: fixture loading and a stub fetch. The fixtures are
 * real payloads exported from the service running on the synthetic store
 * (scripts/export_api_fixtures.py in the pipeline repo). */
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import path from "node:path";
const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "..", "..", "tests", "fixtures");
export function fixture(name) {
    return JSON.parse(readFileSync(path.join(FIXTURES, `${name}.json`), "utf-8"));
}
/** A fetch stub that serves canned payloads by URL prefix and records calls. */
export function stubFetch(routes, log = []) {
    return async (url, init) => {
        const request = {
            url,
            method: init?.method ?? "GET",
            body: init?.body ? JSON.parse(String(init.body)) : null,
        };
        log.push(request);
        for (const [prefix, responder] of Object.entries(routes)) {
            if (url.split("?")[0] === prefix || url.startsWith(`${prefix}?`)) {
                const payload = typeof responder === "function"
                    ? responder(request)
                    : responder;
                if (payload && typeof payload === "object" && "__status__" in payload) {
                    const { __status__, ...rest } = payload;
                    return new Response(JSON.stringify(rest), { status: __status__ });
                }
                return new Response(JSON.stringify(payload), { status: 200 });
            }
        }
        return new Response(JSON.stringify({ error: `no such endpoint: ${url}` }), { status: 404 });
    };
}
/** Count matches of an element pattern with attributes in an HTML string. */
export function extractTags(html, className) {
    const pattern = new RegExp(`<[a-z]+ class="${className}[^"]*"([^>]*)>`, "g");
    const out = [];
    for (const match of html.matchAll(pattern)) {
        const attrs = {};
        for (const attr of match[1].matchAll(/([a-z-]+)="([^"]*)"/g)) {
            attrs[attr[1]] = attr[2];
        }
        out.push(attrs);
    }
    return out;
}
