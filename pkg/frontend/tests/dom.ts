// Shared DOM scaffolding: mounts the real index.html body so tests exercise
// the same markup the browser gets.

import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import { collectElements, App } from "../src/app.js";
import { ApiClient } from "../src/api.js";

// vitest runs with the package root as cwd
const PAGE = readFileSync(resolve(process.cwd(), "index.html"), "utf-8");

export function mountPage(): void {
  const body = PAGE.match(/<body>([\s\S]*)<\/body>/)?.[1] ?? "";
  document.body.innerHTML = body.replace(/<script[\s\S]*?<\/script>/g, "");
}

export interface FakeWindow {
  search: string;
  history: Pick<History, "replaceState">;
  location: Pick<Location, "search">;
}

export function fakeWindow(initialSearch = ""): FakeWindow {
  const win: FakeWindow = {
    search: initialSearch,
    history: {
      replaceState: (_data: unknown, _title: string, url?: string | URL | null) => {
        const text = String(url ?? "");
        win.search = text.startsWith("?") ? text : `?${text}`;
      },
    },
    location: {
      get search() {
        return win.search;
      },
    } as Pick<Location, "search">,
  };
  return win;
}

export function makeApp(initialSearch = ""): App {
  mountPage();
  const win = fakeWindow(initialSearch);
  const app = new App(new ApiClient(""), collectElements(document), {
    history: win.history as History,
    location: win.location as Location,
  });
  (app as unknown as { fakeWin: FakeWindow }).fakeWin = win;
  return app;
}

export function currentSearch(app: App): string {
  return (app as unknown as { fakeWin: FakeWindow }).fakeWin.search;
}

/** Visible data numerics: data-value marks plus .num text content. */
export function renderedNumbers(root: ParentNode): number[] {
  const out: number[] = [];
  for (const node of root.querySelectorAll("[data-value]")) {
    out.push(Number(node.getAttribute("data-value")));
  }
  for (const node of root.querySelectorAll(".num")) {
    const text = node.textContent?.trim() ?? "";
    if (text !== "") out.push(Number(text));
  }
  return out;
}
