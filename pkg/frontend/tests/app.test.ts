import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { WHATIF_DEBOUNCE_MS, debounce } from "../src/app.js";
import { decodeViewState, encodeViewState } from "../src/state.js";
import { currentSearch, makeApp, renderedNumbers } from "./dom.js";
import {
  defaultRoutes,
  installFetchStub,
  payloadNumbers,
  projectionFor,
  type RecordedRequest,
  type RouteResult,
} from "./stub.js";

function panel(id: string): HTMLElement {
  return document.querySelector(`#panel-${id}`) as HTMLElement;
}

function lastRequest(calls: RecordedRequest[], resource: string): RecordedRequest {
  const hits = calls.filter((c) => c.path.endsWith(`/${resource}`));
  expect(hits.length).toBeGreaterThan(0);
  return hits[hits.length - 1] as RecordedRequest;
}

describe("dashboard integration against the stubbed API", () => {
  afterEach(() => {
    vi.unstubAllGlobals();
    vi.useRealTimers();
  });

  it("boots, renders all panels, and mirrors state into the URL", async () => {
    installFetchStub(defaultRoutes);
    const app = makeApp("");
    await app.boot();
    expect(app.state.region).toBe("IN");
    expect(panel("epicurve").querySelectorAll(".bar-cases").length).toBeGreaterThan(0);
    expect(panel("rt").querySelector(".reference")).not.toBeNull();
    expect(panel("projection").querySelector(".band-90")).not.toBeNull();
    expect(decodeViewState(currentSearch(app), "ZZ")).toEqual(app.state);
  });

  it("region cascade repopulates the district dropdown from parent_code", async () => {
    installFetchStub(defaultRoutes);
    const app = makeApp("");
    await app.boot();
    const stateSelect = document.querySelector("#state-select") as HTMLSelectElement;
    const districtSelect = document.querySelector("#district-select") as HTMLSelectElement;

    stateSelect.value = "IN-MH";
    stateSelect.dispatchEvent(new Event("change"));
    await vi.waitFor(() => expect(app.state.region).toBe("IN-MH"));
    expect([...districtSelect.options].map((o) => o.value))
      .toEqual(["IN-MH", "IN-MH-Mumbai", "IN-MH-Pune"]);
    expect(districtSelect.disabled).toBe(false);

    districtSelect.value = "IN-MH-Pune";
    districtSelect.dispatchEvent(new Event("change"));
    await vi.waitFor(() => expect(app.state.region).toBe("IN-MH-Pune"));

    stateSelect.value = "IN-KL";
    stateSelect.dispatchEvent(new Event("change"));
    await vi.waitFor(() => expect(app.state.region).toBe("IN-KL"));
    expect(districtSelect.disabled).toBe(true);
  });

  it("renders no numeric value that is absent from the stubbed payloads", async () => {
    const calls = installFetchStub(defaultRoutes);
    const app = makeApp("?region=IN-KL");
    await app.boot();

    const allowed = payloadNumbers("IN-KL");
    const projParams = lastRequest(calls, "projection").params;
    for (const value of Object.values(projectionFor("IN-KL", projParams))) {
      if (typeof value === "number") allowed.add(value);
      else if (Array.isArray(value)) value.forEach((v) => allowed.add(v as number));
      else if (value && typeof value === "object") {
        Object.values(value).forEach((arr) => (arr as number[]).forEach((v) => allowed.add(v)));
      }
    }
    const rendered = renderedNumbers(document.body);
    expect(rendered.length).toBeGreaterThan(20);
    for (const value of rendered) {
      expect(allowed.has(value), `rendered ${value} missing from payloads`).toBe(true);
    }
  });

  it("log toggle on all-positive data keeps every point, transformed axis", async () => {
    installFetchStub(defaultRoutes);
    const app = makeApp("?region=IN-KL");
    await app.boot();
    const bars = () => [...panel("epicurve").querySelectorAll(".bar-cases")];
    const before = bars();
    const beforeY = before.map((b) => b.getAttribute("y"));

    const toggle = document.querySelector("#scale-log") as HTMLInputElement;
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));

    expect(app.state.scale).toBe("log");
    const after = bars();
    expect(after.length).toBe(before.length); // same point count
    expect(after.map((b) => b.getAttribute("y"))).not.toEqual(beforeY);
    expect(panel("epicurve").querySelector(".zero-note")).toBeNull();
  });

  it("log toggle drops zero-count days and annotates exactly how many", async () => {
    installFetchStub(defaultRoutes);
    const app = makeApp("?region=IN-MH-Pune&scale=log");
    await app.boot();
    const zeroCount = (await import("./stub.js")).SERIES["IN-MH-Pune"]!
      .confirmed.filter((v) => v === 0).length;
    const bars = panel("epicurve").querySelectorAll(".bar-cases");
    expect(bars.length).toBe(5 - zeroCount);
    const note = panel("epicurve").querySelector(".zero-note");
    expect(note).not.toBeNull();
    expect(note!.getAttribute("data-zero-count")).toBe(String(zeroCount));
  });

  it("rt_override=0 collapses the projection band to zero", async () => {
    const calls = installFetchStub(defaultRoutes);
    const app = makeApp("?region=IN-KL");
    await app.boot();

    (document.querySelector("#rt-override") as HTMLInputElement).value = "0";
    await app.applyWhatif();

    expect(lastRequest(calls, "projection").params.get("rt_override")).toBe("0");
    const band = panel("projection").querySelector(".band-90")!;
    const uppers = band.getAttribute("data-upper")!.split(",").map(Number);
    const lowers = band.getAttribute("data-lower")!.split(",").map(Number);
    expect(uppers.every((v) => v === 0)).toBe(true);
    expect(lowers.every((v) => v === 0)).toBe(true);
    const medians = [...panel("projection").querySelectorAll(".line-median-pt")]
      .map((n) => Number(n.getAttribute("data-value")));
    expect(medians.every((v) => v === 0)).toBe(true);
  });

  it("what-if controls put their values on the request", async () => {
    const calls = installFetchStub(defaultRoutes);
    const app = makeApp("?region=IN-KL");
    await app.boot();

    (document.querySelector("#horizon") as HTMLInputElement).value = "30";
    await app.applyWhatif();
    const request = lastRequest(calls, "projection");
    expect(request.params.get("horizon")).toBe("30");
    expect(app.state.projection.horizon).toBe(30);
    // URL mirrors the change
    expect(currentSearch(app)).toContain("horizon=30");
  });

  it("re-applying the same seed yields an identical chart", async () => {
    installFetchStub(defaultRoutes);
    const app = makeApp("?region=IN-KL&seed=5");
    await app.boot();
    const first = panel("projection").innerHTML;
    await app.applyWhatif(); // same params, fresh fetch
    expect(panel("projection").innerHTML).toBe(first);
  });

  it("URL round-trip restores the exact ViewState", async () => {
    installFetchStub(defaultRoutes);
    const app = makeApp("?region=IN-KL");
    await app.boot();
    (document.querySelector("#horizon") as HTMLInputElement).value = "21";
    (document.querySelector("#seed") as HTMLInputElement).value = "7";
    (document.querySelector("#rt-override") as HTMLInputElement).value = "1.1";
    await app.applyWhatif();
    const toggle = document.querySelector("#scale-log") as HTMLInputElement;
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));

    const frozen = { ...app.state, projection: { ...app.state.projection } };
    const query = currentSearch(app);
    expect(query).toBe("?" + encodeViewState(frozen));

    const restored = makeApp(query);
    await restored.boot();
    expect(restored.state).toEqual(frozen);
    expect((document.querySelector("#scale-log") as HTMLInputElement).checked).toBe(true);
    expect((document.querySelector("#rt-override") as HTMLInputElement).value).toBe("1.1");
  });

  it("422 payloads render the insufficient-data placeholder", async () => {
    installFetchStub(defaultRoutes);
    const app = makeApp("?region=IN-KL");
    await app.boot();
    const note = panel("waves").querySelector(".placeholder");
    expect(note).not.toBeNull();
    expect(note!.textContent).toContain("insufficient data");
  });

  it("400 responses surface the API message verbatim", async () => {
    const detail = "rt_override must be a number, got 'frog'";
    installFetchStub((path, params) => {
      if (path.endsWith("/projection")) {
        return { status: 400, body: { error: "InvalidParameter", detail } };
      }
      return defaultRoutes(path, params);
    });
    const app = makeApp("?region=IN-KL");
    await app.boot();
    const banner = panel("projection").querySelector(".error-banner");
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toBe(detail);
  });

  it("cancels in-flight fetches when the region changes (no stale render)", async () => {
    let releaseSlow: (() => void) | null = null;
    installFetchStub(async (path, params): Promise<RouteResult> => {
      if (path.includes("IN-MH-Pune") && path.endsWith("/series")) {
        await new Promise<void>((resolve) => {
          releaseSlow = resolve;
        });
      }
      return defaultRoutes(path, params);
    });
    const app = makeApp("?region=IN-MH-Pune");
    const bootPromise = app.boot();
    await vi.waitFor(() => expect(releaseSlow).not.toBeNull());

    // switch away while Pune's series is still in flight
    const switchPromise = app.selectRegion("IN-KL");
    releaseSlow!();
    await switchPromise;
    await bootPromise.catch(() => undefined);

    const bars = [...panel("epicurve").querySelectorAll(".bar-cases")]
      .map((b) => Number(b.getAttribute("data-value")));
    const kerala = (await import("./stub.js")).SERIES["IN-KL"]!.confirmed;
    expect(bars).toEqual(kerala);
    expect(app.state.region).toBe("IN-KL");
  });

  it("debounce collapses rapid what-if edits into one trailing call", () => {
    vi.useFakeTimers();
    const spy = vi.fn();
    const run = debounce(spy, WHATIF_DEBOUNCE_MS);
    run();
    vi.advanceTimersByTime(100);
    run();
    vi.advanceTimersByTime(100);
    run();
    expect(spy).not.toHaveBeenCalled();
    vi.advanceTimersByTime(WHATIF_DEBOUNCE_MS);
    expect(spy).toHaveBeenCalledTimes(1);
  });
});
